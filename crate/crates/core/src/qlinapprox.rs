//! Quantum circuits for SIMON's single-bit round update and the CHSH-style
//! modification that amplifies the linear-approximation bias.
//!
//! Three circuit families live here, mirroring the cipher analysis bit for
//! bit:
//!
//! * the plain round update on one bit position (five qubits, no bias);
//! * the constrained linear-approximation circuit, which clones `L(j)` into
//!   `L(j+2)` and `R(j)` into `K(j)` and then XORs `L(j)` into the update
//!   output, leaving `Pr(0) = 3/4` on the statistic qubit;
//! * the modified circuit, which replaces the cloned `(R(j), K(j))` pair by
//!   a Bell pair interrogated CHSH-style (a controlled Hadamard driven by
//!   `L(j+1)` and an X-conjugated controlled-rotation pair driven by
//!   `L(j+8)`), lifting `Pr(0)` to `cos^2(theta/2)` or `(1 + sin theta)/2`
//!   per branch and to `cos^2(pi/8)` in aggregate at the optimum.
//!
//! Closed forms for the four `(q1, q3)` branches and the objective
//! `h(theta) = cos^2(theta/2) + (1 + sin theta)/2` are provided alongside the
//! simulations so each can check the other.

use thiserror::Error;

use crate::qsim::{run_circuit, Circuit, SimError};

/// Qubit layout of the six-qubit approximation circuits:
/// q0 = L(j), q1 = L(j+1), q2 = L(j+2), q3 = L(j+8), r = R(j), k = K(j).
pub const QUBIT_Q0: usize = 0;
pub const QUBIT_Q1: usize = 1;
pub const QUBIT_Q2: usize = 2;
pub const QUBIT_Q3: usize = 3;
/// After the update the r qubit carries the statistic `L(j) ^ L'(j)`.
pub const STATISTIC_QUBIT: usize = 4;
pub const QUBIT_K: usize = 5;

/// Qubit carrying `L'(j)` in the five-qubit plain round circuit
/// (l0 = L(j+2), l1 = L(j+1), l2 = L(j+8), r0 = R(j), k0 = K(j)).
pub const ROUND_OUTPUT_QUBIT: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("theta must be finite, got {0}")]
    NonFiniteTheta(f64),
    #[error("the modified circuit requires both cloning constraints")]
    ModifiedNeedsConstraints,
    #[error("invalid bracket: lo ({lo}) must be strictly below hi ({hi})")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Configuration for the six-qubit approximation circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxCircuitConfig {
    pub theta: f64,
    /// Clone L(j) into L(j+2) instead of drawing L(j+2) uniformly.
    pub constrain_l_equal: bool,
    /// Clone R(j) into K(j) instead of drawing K(j) uniformly.
    pub constrain_r_equal_k: bool,
    /// Use the CHSH-style update on the (r, k) pair.
    pub modified: bool,
}

impl ApproxCircuitConfig {
    pub fn build(&self) -> Result<Circuit, ApproxError> {
        if !self.theta.is_finite() {
            return Err(ApproxError::NonFiniteTheta(self.theta));
        }
        if self.modified && !(self.constrain_l_equal && self.constrain_r_equal_k) {
            return Err(ApproxError::ModifiedNeedsConstraints);
        }
        let mut c = Circuit::new(6);
        c.h(QUBIT_Q0).h(QUBIT_Q1);
        if self.constrain_l_equal {
            c.cx(QUBIT_Q0, QUBIT_Q2);
        } else {
            c.h(QUBIT_Q2);
        }
        c.h(QUBIT_Q3).h(STATISTIC_QUBIT);
        if self.constrain_r_equal_k {
            c.cx(STATISTIC_QUBIT, QUBIT_K);
        } else {
            c.h(QUBIT_K);
        }
        c.barrier();
        push_update(&mut c, self.modified, self.theta);
        Ok(c)
    }
}

/// The round-update half shared by all six-qubit builders: compute L'(j)
/// into r, then XOR L(j) in to form the statistic.
fn push_update(c: &mut Circuit, modified: bool, theta: f64) {
    if modified {
        c.ch(QUBIT_Q1, STATISTIC_QUBIT)
            .x(QUBIT_Q3)
            .cu3(-theta, QUBIT_Q3, QUBIT_K)
            .x(QUBIT_Q3)
            .cu3(theta, QUBIT_Q3, QUBIT_K);
    }
    c.ccx(QUBIT_Q1, QUBIT_Q3, STATISTIC_QUBIT)
        .cx(QUBIT_Q2, STATISTIC_QUBIT)
        .cx(QUBIT_K, STATISTIC_QUBIT)
        .barrier()
        .cx(QUBIT_Q0, STATISTIC_QUBIT);
}

/// The quantum round update on one bit position: AND becomes a Toffoli, the
/// XOR chain becomes CNOTs, and Hadamards supply all input combinations.
/// The output marginal is exactly (1/2, 1/2): no bias without constraints.
pub fn build_quantum_round_circuit() -> Circuit {
    let (l0, l1, l2, r0, k0) = (0, 1, 2, ROUND_OUTPUT_QUBIT, 4);
    let mut c = Circuit::new(5);
    c.h(l0).h(l1).h(l2).h(r0).h(k0).barrier();
    c.ccx(l1, l2, r0).cx(l0, r0).cx(k0, r0);
    c
}

/// The constrained linear-approximation circuit; statistic marginal
/// (0.75, 0.25).
pub fn build_linear_approx_circuit() -> Circuit {
    ApproxCircuitConfig {
        theta: 0.0,
        constrain_l_equal: true,
        constrain_r_equal_k: true,
        modified: false,
    }
    .build()
    .expect("constrained plain circuit is always valid")
}

/// The CHSH-modified circuit; statistic marginal (cos^2(pi/8), sin^2(pi/8))
/// at theta = pi/4.
pub fn build_modified_circuit(theta: f64) -> Result<Circuit, ApproxError> {
    ApproxCircuitConfig {
        theta,
        constrain_l_equal: true,
        constrain_r_equal_k: true,
        modified: true,
    }
    .build()
}

/// The modified circuit with q1 and q3 pinned to computational-basis values
/// (X gates in place of Hadamards), isolating one of the four branches.
pub fn build_case_circuit(q1: bool, q3: bool, theta: f64) -> Result<Circuit, ApproxError> {
    if !theta.is_finite() {
        return Err(ApproxError::NonFiniteTheta(theta));
    }
    let mut c = Circuit::new(6);
    c.h(QUBIT_Q0);
    if q1 {
        c.x(QUBIT_Q1);
    }
    c.cx(QUBIT_Q0, QUBIT_Q2);
    if q3 {
        c.x(QUBIT_Q3);
    }
    c.h(STATISTIC_QUBIT).cx(STATISTIC_QUBIT, QUBIT_K).barrier();
    push_update(&mut c, true, theta);
    Ok(c)
}

/// Closed-form Pr(statistic = 0) for a fixed (q1, q3) branch of the modified
/// circuit: `cos^2(theta/2)` when q1 = 0, `(1 + sin theta)/2` when q1 = 1.
pub fn case_probability(q1: bool, q3: bool, theta: f64) -> f64 {
    let _ = q3; // both q3 branches share their formula with the q1 partner
    if q1 {
        (1.0 + theta.sin()) / 2.0
    } else {
        (theta / 2.0).cos().powi(2)
    }
}

/// Simulate one (q1, q3) branch and return Pr(statistic = 0). Matches
/// [`case_probability`] to within 1e-9.
pub fn simulate_case(q1: bool, q3: bool, theta: f64) -> Result<f64, ApproxError> {
    let state = run_circuit(&build_case_circuit(q1, q3, theta)?)?;
    let (p0, _) = state.qubit_probabilities(STATISTIC_QUBIT)?;
    Ok(p0)
}

/// One branch's formula value next to its simulated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseProbability {
    pub q1: bool,
    pub q3: bool,
    pub formula_p0: f64,
    pub simulated_p0: f64,
}

/// All four (q1, q3) branches at one angle.
pub fn case_table(theta: f64) -> Result<[CaseProbability; 4], ApproxError> {
    let mut out = [CaseProbability {
        q1: false,
        q3: false,
        formula_p0: 0.0,
        simulated_p0: 0.0,
    }; 4];
    for (slot, (q1, q3)) in [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .enumerate()
    {
        out[slot] = CaseProbability {
            q1,
            q3,
            formula_p0: case_probability(q1, q3, theta),
            simulated_p0: simulate_case(q1, q3, theta)?,
        };
    }
    Ok(out)
}

/// The branch-sum objective `h(theta) = cos^2(theta/2) + (1 + sin theta)/2`.
/// The full circuit's Pr(statistic = 0) equals `h(theta) / 2`.
pub fn objective_h(theta: f64) -> f64 {
    (theta / 2.0).cos().powi(2) + (1.0 + theta.sin()) / 2.0
}

/// Golden-section maximization of [`objective_h`] on `[lo, hi]`; returns
/// `(theta_star, h(theta_star))` located to within `tol`.
///
/// Near a smooth maximum the objective is flat to machine precision over a
/// window of width ~sqrt(epsilon), so comparison-driven bracketing alone
/// cannot certify tolerances below ~3e-8. The search therefore keeps its
/// bracket above that floor and finishes with one guarded parabolic fit
/// through three bracket points, which pins the vertex far more tightly than
/// the comparisons could.
pub fn optimize_theta(lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), ApproxError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ApproxError::InvalidBracket { lo, hi });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ApproxError::InvalidTolerance(tol));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt 5 - 1)/2
    const COMPARISON_FLOOR: f64 = 1e-5;
    let stop_width = tol.max(COMPARISON_FLOOR);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective_h(x1);
    let mut f2 = objective_h(x2);
    while b - a > stop_width {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective_h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective_h(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let theta_star = parabolic_vertex(mid, b - a, lo, hi).unwrap_or(mid);
    Ok((theta_star, objective_h(theta_star)))
}

/// Vertex of the parabola through (mid - step, mid, mid + step) clamped to
/// `[lo, hi]`; `None` when the fit degenerates.
fn parabolic_vertex(mid: f64, step: f64, lo: f64, hi: f64) -> Option<f64> {
    let x0 = (mid - step).max(lo);
    let x2 = (mid + step).min(hi);
    let x1 = mid.clamp(x0, x2);
    if x0 == x1 || x1 == x2 {
        return None;
    }
    let (f0, f1, f2) = (objective_h(x0), objective_h(x1), objective_h(x2));
    let num = (x1 - x0).powi(2) * (f1 - f2) - (x1 - x2).powi(2) * (f1 - f0);
    let den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
    if den == 0.0 {
        return None;
    }
    let vertex = x1 - 0.5 * num / den;
    vertex.is_finite().then(|| vertex.clamp(lo, hi))
}

/// One row of a theta sweep: per-branch, aggregate and objective values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub p0_case00: f64,
    pub p0_case01: f64,
    pub p0_case10: f64,
    pub p0_case11: f64,
    /// Pr(statistic = 0) of the full modified circuit (uniform q1, q3).
    pub p0_aggregate: f64,
    pub h_theta: f64,
}

/// Sweep `steps` evenly spaced angles over `[lo, hi]` inclusive.
pub fn theta_sweep(lo: f64, hi: f64, steps: usize) -> Result<Vec<SweepRow>, ApproxError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ApproxError::InvalidBracket { lo, hi });
    }
    if steps < 2 {
        return Err(ApproxError::TooFewSteps(steps));
    }
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let theta = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let aggregate = run_circuit(&build_modified_circuit(theta)?)?
            .qubit_probabilities(STATISTIC_QUBIT)?
            .0;
        rows.push(SweepRow {
            theta,
            p0_case00: simulate_case(false, false, theta)?,
            p0_case01: simulate_case(false, true, theta)?,
            p0_case10: simulate_case(true, false, theta)?,
            p0_case11: simulate_case(true, true, theta)?,
            p0_aggregate: aggregate,
            h_theta: objective_h(theta),
        });
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str =
    "theta,p0_case00,p0_case01,p0_case10,p0_case11,p0_aggregate,h_theta";

/// Render sweep rows as CSV with 12 significant digits per value.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cells = [
            row.theta,
            row.p0_case00,
            row.p0_case01,
            row.p0_case10,
            row.p0_case11,
            row.p0_aggregate,
            row.h_theta,
        ];
        let line: Vec<String> = cells.iter().map(|v| format!("{v:.11e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::run_circuit;
    use crate::simon::next_left_bit;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const COS2_PI_8: f64 = 0.8535533905932737;

    fn statistic_p0(circuit: &Circuit) -> f64 {
        run_circuit(circuit)
            .unwrap()
            .qubit_probabilities(STATISTIC_QUBIT)
            .unwrap()
            .0
    }

    #[test]
    fn round_circuit_marginal_is_unbiased() {
        let state = run_circuit(&build_quantum_round_circuit()).unwrap();
        let (p0, p1) = state.qubit_probabilities(ROUND_OUTPUT_QUBIT).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
        assert!((p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn round_circuit_with_zero_inputs_outputs_zero() {
        // Strip the Hadamards: all-zero inputs must leave r0 at |0>.
        let (l0, l1, l2, r0, k0) = (0, 1, 2, ROUND_OUTPUT_QUBIT, 4);
        let mut c = Circuit::new(5);
        c.ccx(l1, l2, r0).cx(l0, r0).cx(k0, r0);
        let state = run_circuit(&c).unwrap();
        let (p0, p1) = state.qubit_probabilities(r0).unwrap();
        assert_eq!((p0, p1), (1.0, 0.0));
    }

    #[test]
    fn round_circuit_agrees_with_per_bit_update_on_basis_inputs() {
        // Prepare each of the 2^5 computational inputs with X gates and check
        // the r0 output against the cipher's per-bit equation.
        let (l0, l1, l2, r0, k0) = (0usize, 1, 2, ROUND_OUTPUT_QUBIT, 4);
        for input in 0..32usize {
            let in_bit = |q: usize| input >> q & 1 == 1;
            let mut c = Circuit::new(5);
            for q in [l0, l1, l2, r0, k0] {
                if in_bit(q) {
                    c.x(q);
                }
            }
            c.ccx(l1, l2, r0).cx(l0, r0).cx(k0, r0);
            let state = run_circuit(&c).unwrap();
            let (p0, p1) = state.qubit_probabilities(r0).unwrap();
            let expected =
                next_left_bit(in_bit(r0), in_bit(k0), in_bit(l1), in_bit(l2), in_bit(l0));
            assert_eq!(p1 > 0.5, expected, "input {input:05b}");
            assert!((p0 + p1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_approx_marginal_is_three_quarters() {
        let p0 = statistic_p0(&build_linear_approx_circuit());
        assert!((p0 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn linear_approx_truth_table_oracle() {
        // Classical enumeration of the free bits with both constraints
        // applied: the statistic is q1 AND q3, zero in 3 of 4 branches.
        let mut zeros = 0;
        for q1 in [false, true] {
            for q3 in [false, true] {
                for q0 in [false, true] {
                    for r in [false, true] {
                        let statistic = q0 ^ next_left_bit(r, r, q1, q3, q0);
                        assert_eq!(statistic, q1 & q3);
                    }
                }
                if !(q1 & q3) {
                    zeros += 1;
                }
            }
        }
        assert_eq!(zeros, 3);
    }

    #[test]
    fn forcing_both_and_inputs_on_flips_the_statistic() {
        // Plain constrained circuit with X in place of H on q1 and q3: the
        // AND fires in every branch, so the statistic marginal is (0, 1).
        let mut plain = Circuit::new(6);
        plain
            .h(QUBIT_Q0)
            .x(QUBIT_Q1)
            .cx(QUBIT_Q0, QUBIT_Q2)
            .x(QUBIT_Q3)
            .h(STATISTIC_QUBIT)
            .cx(STATISTIC_QUBIT, QUBIT_K)
            .barrier()
            .ccx(QUBIT_Q1, QUBIT_Q3, STATISTIC_QUBIT)
            .cx(QUBIT_Q2, STATISTIC_QUBIT)
            .cx(QUBIT_K, STATISTIC_QUBIT)
            .barrier()
            .cx(QUBIT_Q0, STATISTIC_QUBIT);
        let p0 = statistic_p0(&plain);
        assert!(p0.abs() < 1e-12);
    }

    #[test]
    fn modified_circuit_at_optimum() {
        let p0 = statistic_p0(&build_modified_circuit(FRAC_PI_4).unwrap());
        assert!((p0 - 0.85355339).abs() < 1e-8);
        assert!((p0 - COS2_PI_8).abs() < 1e-12);
    }

    #[test]
    fn modified_circuit_reduced_density_matrix_diagonal() {
        let state = run_circuit(&build_modified_circuit(FRAC_PI_4).unwrap()).unwrap();
        let rho = state.partial_trace(&[STATISTIC_QUBIT]).unwrap();
        let diag = rho.diagonal();
        assert!((diag[0] - 0.85355339).abs() < 1e-8);
        assert!((diag[1] - 0.14644661).abs() < 1e-8);
        assert!(rho.hermiticity_error() < 1e-12);
    }

    #[test]
    fn modified_circuit_at_degenerate_angles() {
        // Branch formulas average to (1 + 1 + 0.5 + 0.5)/4 at theta = 0 and
        // (0.5 + 0.5 + 1 + 1)/4 at theta = pi/2 — 0.75 both ways.
        for theta in [0.0, FRAC_PI_2] {
            let p0 = statistic_p0(&build_modified_circuit(theta).unwrap());
            assert!((p0 - 0.75).abs() < 1e-12, "theta {theta}: {p0}");
        }
    }

    #[test]
    fn config_invariant_modified_requires_constraints() {
        for (l, r) in [(false, false), (true, false), (false, true)] {
            let config = ApproxCircuitConfig {
                theta: FRAC_PI_4,
                constrain_l_equal: l,
                constrain_r_equal_k: r,
                modified: true,
            };
            assert_eq!(config.build(), Err(ApproxError::ModifiedNeedsConstraints));
        }
    }

    #[test]
    fn dropping_either_constraint_kills_the_bias() {
        for (l, r) in [(false, false), (true, false), (false, true)] {
            let config = ApproxCircuitConfig {
                theta: 0.0,
                constrain_l_equal: l,
                constrain_r_equal_k: r,
                modified: false,
            };
            let p0 = statistic_p0(&config.build().unwrap());
            assert!((p0 - 0.5).abs() < 1e-12, "constraints ({l},{r}): {p0}");
        }
    }

    #[test]
    fn case_formula_examples() {
        assert!((case_probability(false, false, FRAC_PI_4) - 0.8535533906).abs() < 1e-9);
        assert_eq!(case_probability(true, false, 0.0), 0.5);
        assert!((case_probability(true, true, FRAC_PI_2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn simulated_cases_match_formulas_on_theta_grid() {
        for i in 0..=50 {
            let theta = PI * i as f64 / 50.0;
            for q1 in [false, true] {
                for q3 in [false, true] {
                    let sim = simulate_case(q1, q3, theta).unwrap();
                    let formula = case_probability(q1, q3, theta);
                    assert!(
                        (sim - formula).abs() < 1e-9,
                        "case ({q1},{q3}) at theta {theta}: {sim} vs {formula}"
                    );
                }
            }
        }
    }

    #[test]
    fn q3_value_does_not_change_the_branch_formula() {
        for i in 0..100 {
            let theta = PI * i as f64 / 99.0;
            let a = simulate_case(false, false, theta).unwrap();
            let b = simulate_case(false, true, theta).unwrap();
            assert!((a - b).abs() < 1e-12);
            let c = simulate_case(true, false, theta).unwrap();
            let d = simulate_case(true, true, theta).unwrap();
            assert!((c - d).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_equals_mean_of_cases() {
        for i in 0..=20 {
            let theta = PI * i as f64 / 20.0;
            let table = case_table(theta).unwrap();
            let mean: f64 = table.iter().map(|c| c.simulated_p0).sum::<f64>() / 4.0;
            let aggregate = statistic_p0(&build_modified_circuit(theta).unwrap());
            assert!((aggregate - mean).abs() < 1e-9);
            assert!((aggregate - objective_h(theta) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bias_improvement_over_plain_circuit() {
        let plain = statistic_p0(&build_linear_approx_circuit());
        let modified = statistic_p0(&build_modified_circuit(FRAC_PI_4).unwrap());
        let improvement = modified - plain;
        assert!((improvement - 0.1035533906).abs() < 1e-8);
        assert!(improvement > 0.1);
    }

    #[test]
    fn objective_values() {
        assert!((objective_h(0.0) - 1.5).abs() < 1e-15);
        assert!((objective_h(FRAC_PI_4) - 2.0 * COS2_PI_8).abs() < 1e-15);
        assert!((objective_h(FRAC_PI_2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn objective_is_stationary_at_the_optimum() {
        let step = 1e-4;
        let derivative =
            (objective_h(FRAC_PI_4 + step) - objective_h(FRAC_PI_4 - step)) / (2.0 * step);
        assert!(derivative.abs() < 1e-6);
    }

    #[test]
    fn golden_section_finds_quarter_pi() {
        let (theta, h) = optimize_theta(0.0, FRAC_PI_2, 1e-9).unwrap();
        assert!((theta - FRAC_PI_4).abs() < 1e-8);
        assert!((h - 2.0 * COS2_PI_8).abs() < 1e-10);
    }

    #[test]
    fn golden_section_hits_increasing_boundary() {
        // h is increasing on [0, pi/4], so the constrained maximum sits on
        // the right edge.
        let (theta, _) = optimize_theta(0.0, FRAC_PI_4, 1e-9).unwrap();
        assert!((theta - FRAC_PI_4).abs() < 1e-8);
    }

    #[test]
    fn golden_section_rejects_bad_arguments() {
        assert!(matches!(
            optimize_theta(1.0, 1.0, 1e-9),
            Err(ApproxError::InvalidBracket { .. })
        ));
        assert!(matches!(
            optimize_theta(2.0, 1.0, 1e-9),
            Err(ApproxError::InvalidBracket { .. })
        ));
        assert!(matches!(
            optimize_theta(0.0, 1.0, 0.0),
            Err(ApproxError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn sweep_argmax_lands_on_quarter_pi() {
        let rows = theta_sweep(0.0, FRAC_PI_2, 101).unwrap();
        let best = rows
            .iter()
            .max_by(|a, b| a.p0_aggregate.partial_cmp(&b.p0_aggregate).unwrap())
            .unwrap();
        let grid_step = FRAC_PI_2 / 100.0;
        assert!((best.theta - FRAC_PI_4).abs() <= grid_step + 1e-12);
    }

    #[test]
    fn sweep_argmax_at_right_edge_of_low_interval() {
        let rows = theta_sweep(0.0, 0.1, 11).unwrap();
        let best = rows
            .iter()
            .max_by(|a, b| a.p0_aggregate.partial_cmp(&b.p0_aggregate).unwrap())
            .unwrap();
        assert!((best.theta - 0.1).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_bad_arguments() {
        assert!(matches!(
            theta_sweep(0.0, 1.0, 1),
            Err(ApproxError::TooFewSteps(1))
        ));
        assert!(matches!(
            theta_sweep(1.0, 0.0, 10),
            Err(ApproxError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn sweep_csv_has_header_and_12_significant_digits() {
        let rows = theta_sweep(0.0, FRAC_PI_2, 3).unwrap();
        let csv = sweep_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 7);
        // 11 digits after the point in scientific notation = 12 significant.
        for cell in row.split(',') {
            let mantissa = cell.split('e').next().unwrap();
            let digits = mantissa.trim_start_matches('-');
            assert_eq!(digits.split('.').nth(1).unwrap().len(), 11, "{cell}");
        }
    }
}
