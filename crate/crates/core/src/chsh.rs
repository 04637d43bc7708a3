//! The CHSH nonlocal game and its Boolean circuit realizations.
//!
//! Two players receive uniform bits x and y, answer with bits a and b, and
//! win when `x AND y == a XOR b`. Deterministic classical strategies top out
//! at 3/4; sharing a Bell pair and measuring in tilted bases reaches
//! cos^2(pi/8) = (2 + sqrt 2)/4.
//!
//! Both circuit builders compute the win indicator `f = (x AND y) XOR a XOR b`
//! into a dedicated qubit, so the game value appears as the probability of
//! reading 0 there.

use crate::qsim::Circuit;

/// Qubit layout shared by both builders.
pub const QUBIT_X: usize = 0;
pub const QUBIT_Y: usize = 1;
/// The win-indicator qubit; `f = 0` means the game was won.
pub const QUBIT_F: usize = 2;
pub const QUBIT_A: usize = 3;
pub const QUBIT_B: usize = 4;

/// The win predicate `x AND y == a XOR b`.
pub fn wins(x: bool, y: bool, a: bool, b: bool) -> bool {
    (x && y) == (a ^ b)
}

/// A deterministic classical strategy: each player's answer as a function of
/// their input bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalStrategy {
    /// Alice's answers for x = 0 and x = 1.
    pub alice: [bool; 2],
    /// Bob's answers for y = 0 and y = 1.
    pub bob: [bool; 2],
}

/// Per-input outcomes and overall value of one strategy under uniform inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub win_probability: f64,
    /// (x, y, won) for the four input pairs.
    pub per_input: [(bool, bool, bool); 4],
}

impl ClassicalStrategy {
    /// All 16 deterministic strategies.
    pub fn all() -> Vec<ClassicalStrategy> {
        let mut out = Vec::with_capacity(16);
        for code in 0..16u8 {
            out.push(ClassicalStrategy {
                alice: [code & 1 != 0, code & 2 != 0],
                bob: [code & 4 != 0, code & 8 != 0],
            });
        }
        out
    }

    pub fn evaluate(&self) -> GameResult {
        let mut per_input = [(false, false, false); 4];
        let mut won = 0u32;
        for (slot, (x, y)) in [(false, false), (false, true), (true, false), (true, true)]
            .into_iter()
            .enumerate()
        {
            let w = wins(x, y, self.alice[x as usize], self.bob[y as usize]);
            per_input[slot] = (x, y, w);
            won += w as u32;
        }
        GameResult {
            win_probability: f64::from(won) / 4.0,
            per_input,
        }
    }

    pub fn win_probability(&self) -> f64 {
        self.evaluate().win_probability
    }
}

/// Exhaustively search the 16 deterministic strategies and return an argmax.
///
/// Mixtures of deterministic strategies are convex combinations, so shared
/// randomness cannot beat the value returned here.
pub fn best_classical_strategy() -> (ClassicalStrategy, f64) {
    ClassicalStrategy::all()
        .into_iter()
        .map(|s| (s, s.win_probability()))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite probabilities"))
        .expect("strategy set is non-empty")
}

/// The Boolean circuit for the best classical strategy.
///
/// H on x, y and a supplies uniform inputs; the a->b CNOT clones Alice's
/// answer so a = b always; Toffoli and the two CNOTs accumulate
/// `f = (x AND y) XOR a XOR b`. The f marginal comes out (0.75, 0.25).
pub fn build_classical_chsh_circuit() -> Circuit {
    let mut c = Circuit::new(5);
    c.h(QUBIT_X)
        .h(QUBIT_Y)
        .h(QUBIT_A)
        .cx(QUBIT_A, QUBIT_B)
        .barrier()
        .ccx(QUBIT_X, QUBIT_Y, QUBIT_F)
        .cx(QUBIT_A, QUBIT_F)
        .cx(QUBIT_B, QUBIT_F);
    c
}

/// The entangled-strategy circuit, parameterized by Bob's rotation angle.
///
/// (a, b) start as the Bell pair (|00> + |11>)/sqrt2. Alice's strategy is a
/// controlled Hadamard: x = 1 moves her measurement to the |+>/|-> basis.
/// Bob's strategy is the X-conjugated controlled-rotation pair: his qubit is
/// rotated by -theta when y = 0 and by +theta when y = 1, i.e. he measures in
/// the basis tilted by +theta/2 or -theta/2. At theta = pi/4 those are the
/// pi/8-tilted bases (the y = 1 basis is the 3pi/8 pair up to outcome
/// relabeling) and the win probability reaches (2 + sqrt 2)/4.
pub fn build_quantum_chsh_circuit(theta: f64) -> Circuit {
    let mut c = Circuit::new(5);
    c.h(QUBIT_X)
        .h(QUBIT_Y)
        .h(QUBIT_A)
        .cx(QUBIT_A, QUBIT_B)
        .barrier()
        .ch(QUBIT_X, QUBIT_A)
        .x(QUBIT_Y)
        .cu3(-theta, QUBIT_Y, QUBIT_B)
        .x(QUBIT_Y)
        .cu3(theta, QUBIT_Y, QUBIT_B)
        .barrier()
        .ccx(QUBIT_X, QUBIT_Y, QUBIT_F)
        .cx(QUBIT_A, QUBIT_F)
        .cx(QUBIT_B, QUBIT_F);
    c
}
