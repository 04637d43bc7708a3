//! Dense statevector simulator for the small real-rotation gate set used by
//! the circuit builders in this crate.
//!
//! Qubit `q` is the q-th least significant bit of the basis-state index, so
//! basis index `0b10` of a two-qubit register means qubit 1 is `1` and qubit
//! 0 is `0`. Controlled gates act on their target only in the subspace where
//! every control is `1`. All supported gates are real unitaries; amplitudes
//! are nevertheless stored as `Complex64` to keep the engine general.

mod circuit;
mod density;

pub use circuit::{Circuit, CircuitOp, Gate};
pub use density::DensityMatrix;

use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on register width; 2^24 amplitudes is the largest state this
/// simulator will allocate.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("qubit {0} used more than once in a single op")]
    IndexCollision(usize),
    #[error("gate '{gate}' expects {expected} control(s), got {got}")]
    ControlArity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gate '{gate}' expects {expected} target(s), got {got}")]
    TargetArity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("cu3 requires a theta angle")]
    MissingTheta,
    #[error("gate '{0}' does not take a theta angle")]
    UnexpectedTheta(&'static str),
    #[error("theta must be finite, got {0}")]
    NonFiniteTheta(f64),
    #[error("keep list must be non-empty, strictly increasing and in range")]
    BadKeepList,
    #[error("invalid circuit json: {0}")]
    Json(String),
}

/// A dense 2x2, 4x4 or 8x8 unitary, row-major. Produced by the gate factory
/// for inspection and unitarity checks; the simulator itself applies gates
/// through a controlled 2x2 kernel instead.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    fn from_rows(dim: usize, rows: &[&[f64]]) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            for &v in *row {
                entries.push(Complex64::new(v, 0.0));
            }
        }
        GateMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Max-norm of G*G^dagger - I; zero for an exact unitary.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entry(r, k) * self.entry(c, k).conj();
                }
                let expected = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }
}

/// The real rotation `[[cos t/2, -sin t/2], [sin t/2, cos t/2]]`, i.e. the
/// phase-free special case of the generic single-qubit rotation that every
/// cu3 op in this crate uses.
pub fn ry_matrix(theta: f64) -> Result<GateMatrix, SimError> {
    if !theta.is_finite() {
        return Err(SimError::NonFiniteTheta(theta));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Ok(GateMatrix::from_rows(2, &[&[c, -s], &[s, c]]))
}

pub fn hadamard_matrix() -> GateMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    GateMatrix::from_rows(2, &[&[h, h], &[h, -h]])
}

pub fn pauli_x_matrix() -> GateMatrix {
    GateMatrix::from_rows(2, &[&[0.0, 1.0], &[1.0, 0.0]])
}

impl Gate {
    /// Full matrix of the gate including control qubits. Control bits are the
    /// high bits of the matrix basis index, so `cx` comes out as the familiar
    /// `diag(I, X)` block form. `barrier` is the 2x2 identity.
    pub fn matrix(self, theta: Option<f64>) -> Result<GateMatrix, SimError> {
        let embed = |u: GateMatrix, controls: usize| -> GateMatrix {
            let dim = u.dim << controls;
            let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
            for i in 0..dim {
                entries[i * dim + i] = Complex64::new(1.0, 0.0);
            }
            // Overwrite the all-controls-on block with u.
            let base = dim - u.dim;
            for r in 0..u.dim {
                for c in 0..u.dim {
                    entries[(base + r) * dim + (base + c)] = u.entry(r, c);
                }
            }
            GateMatrix { dim, entries }
        };
        match self {
            Gate::H => Ok(hadamard_matrix()),
            Gate::X => Ok(pauli_x_matrix()),
            Gate::Cx => Ok(embed(pauli_x_matrix(), 1)),
            Gate::Ccx => Ok(embed(pauli_x_matrix(), 2)),
            Gate::Ch => Ok(embed(hadamard_matrix(), 1)),
            Gate::Cu3 => {
                let theta = theta.ok_or(SimError::MissingTheta)?;
                Ok(embed(ry_matrix(theta)?, 1))
            }
            Gate::Barrier => Ok(GateMatrix::from_rows(2, &[&[1.0, 0.0], &[0.0, 1.0]])),
        }
    }
}

/// 2^n complex amplitudes of an n-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// All-zeros computational basis state |0...0>.
pub fn zero_state(num_qubits: usize) -> Result<StateVector, SimError> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(SimError::QubitCount(num_qubits));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { num_qubits, amps })
}

/// Run a circuit from |0...0> and return the final state.
pub fn run_circuit(circuit: &Circuit) -> Result<StateVector, SimError> {
    circuit.validate()?;
    let mut state = zero_state(circuit.qubits)?;
    for op in &circuit.ops {
        state.apply(op)?;
    }
    Ok(state)
}

impl StateVector {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Sum of |amplitude|^2; 1 for any state reached through the gate set.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply one gate op in place.
    pub fn apply(&mut self, op: &CircuitOp) -> Result<(), SimError> {
        op.validate(self.num_qubits)?;
        let control_mask: usize = op.controls.iter().map(|&c| 1usize << c).sum();
        let unitary: [[Complex64; 2]; 2] = match op.gate {
            Gate::Barrier => return Ok(()),
            Gate::H | Gate::Ch => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::X | Gate::Cx | Gate::Ccx => {
                let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
                [[zero, one], [one, zero]]
            }
            Gate::Cu3 => {
                let theta = op.theta.expect("validated above");
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
        };
        self.apply_controlled_unitary(control_mask, op.targets[0], &unitary);
        Ok(())
    }

    fn apply_controlled_unitary(
        &mut self,
        control_mask: usize,
        target: usize,
        u: &[[Complex64; 2]; 2],
    ) {
        let target_mask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & target_mask == 0 && i & control_mask == control_mask {
                let j = i | target_mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[j] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// Exact (p0, p1) marginal of one qubit. Equals the diagonal of the
    /// one-qubit reduced density matrix term for term, including the floating
    /// point summation order.
    pub fn qubit_probabilities(&self, qubit: usize) -> Result<(f64, f64), SimError> {
        if qubit >= self.num_qubits {
            return Err(SimError::QubitIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mask = 1usize << qubit;
        let (mut p0, mut p1) = (0.0f64, 0.0f64);
        for (i, amp) in self.amps.iter().enumerate() {
            // (a * conj(a)).re mirrors the arithmetic partial_trace uses for
            // its diagonal, which keeps the two routes bit-identical.
            let p = (amp * amp.conj()).re;
            if i & mask == 0 {
                p0 += p;
            } else {
                p1 += p;
            }
        }
        Ok((p0, p1))
    }

    /// Reduced density matrix over the `keep` qubits (ascending, no
    /// duplicates); everything else is traced out.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, SimError> {
        density::partial_trace(self, keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    const COS_PI_8: f64 = 0.9238795325112867;
    const SIN_PI_8: f64 = 0.3826834323650898;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() < tol,
            "got {got}, want {want} (tol {tol})"
        );
    }

    fn assert_amps(state: &StateVector, want: &[(usize, f64)], tol: f64) {
        let mut expected = vec![0.0; state.amplitudes().len()];
        for &(idx, v) in want {
            expected[idx] = v;
        }
        for (i, amp) in state.amplitudes().iter().enumerate() {
            assert!(
                (amp.re - expected[i]).abs() <= tol && amp.im.abs() <= tol,
                "amplitude {i}: got {amp}, want {}",
                expected[i]
            );
        }
    }

    /// Seeded random unit vector for involution checks.
    fn random_state(num_qubits: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1usize << num_qubits)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector { num_qubits, amps }
    }

    fn op(gate: Gate, controls: &[usize], targets: &[usize], theta: Option<f64>) -> CircuitOp {
        CircuitOp {
            gate,
            controls: controls.to_vec(),
            targets: targets.to_vec(),
            theta,
        }
    }

    #[test]
    fn zero_state_is_ket_zero() {
        let s = zero_state(1).unwrap();
        assert_amps(&s, &[(0, 1.0)], 0.0);
        let s = zero_state(2).unwrap();
        assert_amps(&s, &[(0, 1.0)], 0.0);
        let s = zero_state(6).unwrap();
        assert_eq!(s.amplitudes().len(), 64);
        assert_amps(&s, &[(0, 1.0)], 0.0);
    }

    #[test]
    fn zero_state_rejects_bad_counts() {
        assert_eq!(zero_state(0), Err(SimError::QubitCount(0)));
        assert_eq!(zero_state(25), Err(SimError::QubitCount(25)));
    }

    #[test]
    fn ry_matrix_special_angles() {
        let id = ry_matrix(0.0).unwrap();
        assert_close(id.entry(0, 0).re, 1.0, 1e-15);
        assert_close(id.entry(0, 1).re, 0.0, 1e-15);

        let pi = ry_matrix(PI).unwrap();
        assert_close(pi.entry(0, 0).re, 0.0, 1e-15);
        assert_close(pi.entry(0, 1).re, -1.0, 1e-15);
        assert_close(pi.entry(1, 0).re, 1.0, 1e-15);

        let q = ry_matrix(FRAC_PI_4).unwrap();
        assert_close(q.entry(0, 0).re, COS_PI_8, 1e-15);
        assert_close(q.entry(0, 1).re, -SIN_PI_8, 1e-15);
        assert_close(q.entry(1, 0).re, SIN_PI_8, 1e-15);
        assert_close(q.entry(1, 1).re, COS_PI_8, 1e-15);

        assert!(matches!(
            ry_matrix(f64::INFINITY),
            Err(SimError::NonFiniteTheta(_))
        ));
    }

    #[test]
    fn gate_factory_matrices_are_unitary() {
        for (gate, theta) in [
            (Gate::H, None),
            (Gate::X, None),
            (Gate::Cx, None),
            (Gate::Ccx, None),
            (Gate::Ch, None),
            (Gate::Cu3, Some(0.3)),
            (Gate::Cu3, Some(-2.7)),
            (Gate::Barrier, None),
        ] {
            let m = gate.matrix(theta).unwrap();
            assert!(
                m.unitarity_error() < 1e-12,
                "{} not unitary: {}",
                gate.name(),
                m.unitarity_error()
            );
        }
    }

    #[test]
    fn hadamard_makes_plus_state() {
        let mut s = zero_state(1).unwrap();
        s.apply(&op(Gate::H, &[], &[0], None)).unwrap();
        assert_amps(&s, &[(0, FRAC_1_SQRT_2), (1, FRAC_1_SQRT_2)], 1e-15);
    }

    #[test]
    fn cnot_completes_bell_pair() {
        // (|00> + |10>)/sqrt2 --CX(0->1)--> (|00> + |11>)/sqrt2
        let mut s = zero_state(2).unwrap();
        s.apply(&op(Gate::H, &[], &[0], None)).unwrap();
        s.apply(&op(Gate::Cx, &[0], &[1], None)).unwrap();
        assert_amps(&s, &[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)], 1e-15);
    }

    #[test]
    fn cu3_on_bell_pair_matches_closed_form() {
        // CU3(pi/4) controlled by qubit 1 acting on qubit 0 of a Bell pair.
        // In |q0 q1> ket order the result is
        //   (1/sqrt2)(|00> - sin(pi/8)|01> + cos(pi/8)|11>).
        let mut s = zero_state(2).unwrap();
        s.apply(&op(Gate::H, &[], &[0], None)).unwrap();
        s.apply(&op(Gate::Cx, &[0], &[1], None)).unwrap();
        s.apply(&op(Gate::Cu3, &[1], &[0], Some(FRAC_PI_4)))
            .unwrap();
        // |q0 q1> = |01> is basis index 0b10 = 2.
        assert_amps(
            &s,
            &[
                (0, FRAC_1_SQRT_2),
                (2, -SIN_PI_8 * FRAC_1_SQRT_2),
                (3, COS_PI_8 * FRAC_1_SQRT_2),
            ],
            1e-15,
        );
    }

    #[test]
    fn barrier_is_identity() {
        let mut s = random_state(3, 7);
        let before = s.clone();
        s.apply(&op(Gate::Barrier, &[], &[], None)).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn run_circuit_empty_and_bell() {
        let c = Circuit::new(2);
        let s = run_circuit(&c).unwrap();
        assert_amps(&s, &[(0, 1.0)], 0.0);

        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1);
        let s = run_circuit(&c).unwrap();
        assert_amps(&s, &[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)], 1e-15);
    }

    #[test]
    fn qubit_probabilities_basics() {
        let mut s = zero_state(1).unwrap();
        s.apply(&op(Gate::X, &[], &[0], None)).unwrap();
        assert_eq!(s.qubit_probabilities(0).unwrap(), (0.0, 1.0));

        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1);
        let bell = run_circuit(&c).unwrap();
        for q in 0..2 {
            let (p0, p1) = bell.qubit_probabilities(q).unwrap();
            assert_close(p0, 0.5, 1e-15);
            assert_close(p1, 0.5, 1e-15);
        }
        assert!(bell.qubit_probabilities(2).is_err());
    }

    #[test]
    fn norm_preserved_through_long_gate_sequence() {
        let mut s = random_state(4, 99);
        let theta = 1.234;
        let ops = [
            op(Gate::H, &[], &[0], None),
            op(Gate::X, &[], &[2], None),
            op(Gate::Cx, &[0], &[3], None),
            op(Gate::Ccx, &[1, 3], &[2], None),
            op(Gate::Ch, &[2], &[0], None),
            op(Gate::Cu3, &[3], &[1], Some(theta)),
            op(Gate::Barrier, &[], &[], None),
        ];
        for o in ops.iter().cycle().take(700) {
            s.apply(o).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_rejects_malformed_ops() {
        let mut s = zero_state(2).unwrap();
        assert!(matches!(
            s.apply(&op(Gate::Cu3, &[0], &[1], None)),
            Err(SimError::MissingTheta)
        ));
        assert!(matches!(
            s.apply(&op(Gate::Cx, &[0], &[0], None)),
            Err(SimError::IndexCollision(0))
        ));
        assert!(matches!(
            s.apply(&op(Gate::H, &[], &[2], None)),
            Err(SimError::QubitIndex { .. })
        ));
        assert!(matches!(
            s.apply(&op(Gate::Ccx, &[0], &[1], None)),
            Err(SimError::ControlArity { .. })
        ));
    }

    proptest! {
        #[test]
        fn involutions_return_original_state(seed in 0u64..1000) {
            let original = random_state(3, seed);
            for (gate, controls, target) in [
                (Gate::H, vec![], 1usize),
                (Gate::X, vec![], 2),
                (Gate::Cx, vec![0usize], 1),
                (Gate::Ccx, vec![0, 2], 1),
            ] {
                let mut s = original.clone();
                let o = op(gate, &controls, &[target], None);
                s.apply(&o).unwrap();
                s.apply(&o).unwrap();
                for (a, b) in s.amplitudes().iter().zip(original.amplitudes()) {
                    prop_assert!((a - b).norm() < 1e-10);
                }
            }
        }

        #[test]
        fn cu3_negative_theta_inverts(seed in 0u64..1000, theta in -10.0f64..10.0) {
            let original = random_state(3, seed);
            let mut s = original.clone();
            s.apply(&op(Gate::Cu3, &[2], &[0], Some(theta))).unwrap();
            s.apply(&op(Gate::Cu3, &[2], &[0], Some(-theta))).unwrap();
            for (a, b) in s.amplitudes().iter().zip(original.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
