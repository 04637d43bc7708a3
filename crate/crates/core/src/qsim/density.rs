//! Reduced density matrices.

use num_complex::Complex64;

use super::{SimError, StateVector};

/// Hermitian, trace-one matrix over a subset of qubits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// Real parts of the diagonal: the measurement probabilities of the kept
    /// subsystem in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i).re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Max-norm of rho - rho^dagger; zero for an exact Hermitian matrix.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order, computed with cyclic Jacobi rotations.
    /// Intended for the small matrices a partial trace produces; positive
    /// semidefiniteness checks read the first entry.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = self.entries.clone();
        let idx = |r: usize, c: usize| r * n + c;
        for _sweep in 0..60 {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[idx(p, q)].norm_sqr())
                .sum();
            if off < 1e-28 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[idx(p, q)];
                    let g = apq.norm();
                    if g < 1e-300 {
                        continue;
                    }
                    let phase = apq / g;
                    let app = a[idx(p, p)].re;
                    let aqq = a[idx(q, q)].re;
                    let tau = (aqq - app) / (2.0 * g);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Unitary differs from identity only in rows/cols p and q:
                    //   G[p][p] = c,             G[p][q] = s * phase
                    //   G[q][p] = -s * conj(phase), G[q][q] = c * conj(phase)
                    let gpp = Complex64::new(c, 0.0);
                    let gpq = phase * s;
                    let gqp = -phase.conj() * s;
                    let gqq = phase.conj() * c;
                    for k in 0..n {
                        if k == p || k == q {
                            continue;
                        }
                        let akp = a[idx(k, p)];
                        let akq = a[idx(k, q)];
                        a[idx(k, p)] = akp * gpp + akq * gqp;
                        a[idx(k, q)] = akp * gpq + akq * gqq;
                        let apk = a[idx(p, k)];
                        let aqk = a[idx(q, k)];
                        a[idx(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                        a[idx(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                    }
                    let new_app = app * c * c + aqq * s * s - 2.0 * c * s * g;
                    let new_aqq = app * s * s + aqq * c * c + 2.0 * c * s * g;
                    a[idx(p, p)] = Complex64::new(new_app, 0.0);
                    a[idx(q, q)] = Complex64::new(new_aqq, 0.0);
                    a[idx(p, q)] = Complex64::new(0.0, 0.0);
                    a[idx(q, p)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        eig
    }
}

/// Trace out every qubit not named in `keep` (which must be non-empty,
/// strictly increasing and within range).
pub(super) fn partial_trace(
    state: &StateVector,
    keep: &[usize],
) -> Result<DensityMatrix, SimError> {
    let n = state.num_qubits();
    let valid =
        !keep.is_empty() && keep.iter().all(|&q| q < n) && keep.windows(2).all(|w| w[0] < w[1]);
    if !valid {
        if let Some(&q) = keep.iter().find(|&&q| q >= n) {
            return Err(SimError::QubitIndex {
                index: q,
                num_qubits: n,
            });
        }
        return Err(SimError::BadKeepList);
    }

    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kept_dim = 1usize << keep.len();
    let traced_dim = 1usize << traced.len();

    // Scatter the bits of a compact kept/traced index into their positions
    // within the full basis index.
    let scatter = |compact: usize, positions: &[usize]| -> usize {
        positions
            .iter()
            .enumerate()
            .fold(0, |acc, (bit, &q)| acc | (((compact >> bit) & 1) << q))
    };

    let amps = state.amplitudes();
    let mut entries = vec![Complex64::new(0.0, 0.0); kept_dim * kept_dim];
    for row in 0..kept_dim {
        let row_base = scatter(row, keep);
        for col in 0..kept_dim {
            let col_base = scatter(col, keep);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let t_bits = scatter(t, &traced);
                acc += amps[row_base | t_bits] * amps[col_base | t_bits].conj();
            }
            entries[row * kept_dim + col] = acc;
        }
    }
    Ok(DensityMatrix {
        num_qubits: keep.len(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{run_circuit, zero_state, Circuit};
    use super::*;

    #[test]
    fn keep_first_qubit_of_ket_zero_zero() {
        let s = zero_state(2).unwrap();
        let rho = s.partial_trace(&[0]).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!(rho.entry(1, 1).norm() < 1e-15);
        assert!(rho.entry(0, 1).norm() < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1);
        let s = run_circuit(&c).unwrap();
        for q in 0..2 {
            let rho = s.partial_trace(&[q]).unwrap();
            assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-15);
            assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-15);
            assert!(rho.entry(0, 1).norm() < 1e-15);
            assert!(rho.entry(1, 0).norm() < 1e-15);
        }
    }

    #[test]
    fn reduced_matrix_is_hermitian_trace_one_psd() {
        let mut c = Circuit::new(4);
        c.h(0).cx(0, 2).ch(2, 1).cu3(0.7, 1, 3).ccx(0, 1, 3);
        let s = run_circuit(&c).unwrap();
        for keep in [vec![0], vec![2], vec![1, 3], vec![0, 2, 3]] {
            let rho = s.partial_trace(&keep).unwrap();
            assert!(rho.hermiticity_error() < 1e-12);
            assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            let eig = rho.eigenvalues();
            assert!(eig[0] >= -1e-10, "negative eigenvalue {}", eig[0]);
            assert!((eig.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvalues_of_pure_and_mixed_marginals() {
        // Pure product state: eigenvalues (0, 1).
        let s = zero_state(2).unwrap();
        let eig = s.partial_trace(&[1]).unwrap().eigenvalues();
        assert!((eig[0] - 0.0).abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);

        // Bell marginal: eigenvalues (1/2, 1/2).
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1);
        let bell = run_circuit(&c).unwrap();
        let eig = bell.partial_trace(&[0]).unwrap().eigenvalues();
        assert!((eig[0] - 0.5).abs() < 1e-12 && (eig[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_matches_qubit_probabilities_exactly() {
        let mut c = Circuit::new(5);
        c.h(0)
            .h(1)
            .cx(0, 3)
            .ch(1, 2)
            .cu3(1.1, 3, 4)
            .ccx(1, 3, 4)
            .cx(4, 0);
        let s = run_circuit(&c).unwrap();
        for q in 0..5 {
            let (p0, p1) = s.qubit_probabilities(q).unwrap();
            let diag = s.partial_trace(&[q]).unwrap().diagonal();
            // Bit-for-bit equality: same arithmetic, same summation order.
            assert_eq!(p0, diag[0]);
            assert_eq!(p1, diag[1]);
        }
    }

    #[test]
    fn keep_list_validation() {
        let s = zero_state(3).unwrap();
        assert_eq!(s.partial_trace(&[]), Err(SimError::BadKeepList));
        assert_eq!(s.partial_trace(&[1, 0]), Err(SimError::BadKeepList));
        assert_eq!(s.partial_trace(&[1, 1]), Err(SimError::BadKeepList));
        assert!(matches!(
            s.partial_trace(&[3]),
            Err(SimError::QubitIndex { .. })
        ));
    }

    #[test]
    fn keeping_all_qubits_gives_projector_onto_state() {
        let mut c = Circuit::new(2);
        c.h(0).ch(0, 1);
        let s = run_circuit(&c).unwrap();
        let rho = s.partial_trace(&[0, 1]).unwrap();
        let amps = s.amplitudes();
        for r in 0..4 {
            for col in 0..4 {
                assert!((rho.entry(r, col) - amps[r] * amps[col].conj()).norm() < 1e-14);
            }
        }
        // Projector has eigenvalues (0, 0, 0, 1).
        let eig = rho.eigenvalues();
        assert!(eig[..3].iter().all(|e| e.abs() < 1e-10));
        assert!((eig[3] - 1.0).abs() < 1e-10);
    }
}
