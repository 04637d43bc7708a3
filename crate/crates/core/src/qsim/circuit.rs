//! Circuit container and its JSON wire format.
//!
//! A [`Circuit`] is an ordered list of gate applications over a fixed qubit
//! count. The serialized form is a strict contract: unknown JSON keys are
//! rejected, gate names are lowercase, and `theta` is present exactly for
//! `cu3` ops.

use serde::{Deserialize, Serialize};

use super::SimError;

/// Gate vocabulary. Everything the builders in this crate emit is covered by
/// a single-qubit unitary with zero, one or two controls; `barrier` is a
/// semantically inert marker separating the preparation and update stages of
/// a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    H,
    X,
    Cx,
    Ccx,
    Ch,
    Cu3,
    Barrier,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Cx => "cx",
            Gate::Ccx => "ccx",
            Gate::Ch => "ch",
            Gate::Cu3 => "cu3",
            Gate::Barrier => "barrier",
        }
    }

    /// Number of control qubits the gate expects.
    pub fn control_arity(self) -> usize {
        match self {
            Gate::H | Gate::X | Gate::Barrier => 0,
            Gate::Cx | Gate::Ch | Gate::Cu3 => 1,
            Gate::Ccx => 2,
        }
    }

    /// Number of target qubits the gate expects.
    pub fn target_arity(self) -> usize {
        match self {
            Gate::Barrier => 0,
            _ => 1,
        }
    }

    pub fn takes_theta(self) -> bool {
        matches!(self, Gate::Cu3)
    }
}

/// One gate application: which gate, on which qubits, with which angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitOp {
    pub gate: Gate,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl CircuitOp {
    /// Check shape, indices and angle against a circuit of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<(), SimError> {
        let gate = self.gate;
        if gate != Gate::Barrier && self.controls.len() != gate.control_arity() {
            return Err(SimError::ControlArity {
                gate: gate.name(),
                expected: gate.control_arity(),
                got: self.controls.len(),
            });
        }
        if gate != Gate::Barrier && self.targets.len() != gate.target_arity() {
            return Err(SimError::TargetArity {
                gate: gate.name(),
                expected: gate.target_arity(),
                got: self.targets.len(),
            });
        }
        let mut seen = 0u32;
        for &q in self.controls.iter().chain(&self.targets) {
            if q >= num_qubits {
                return Err(SimError::QubitIndex {
                    index: q,
                    num_qubits,
                });
            }
            // num_qubits <= MAX_QUBITS = 24, so a u32 bitmask suffices.
            if seen & (1 << q) != 0 {
                return Err(SimError::IndexCollision(q));
            }
            seen |= 1 << q;
        }
        match (self.theta, gate.takes_theta()) {
            (None, true) => return Err(SimError::MissingTheta),
            (Some(_), false) => return Err(SimError::UnexpectedTheta(gate.name())),
            (Some(t), true) if !t.is_finite() => return Err(SimError::NonFiniteTheta(t)),
            _ => {}
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed number of qubits.
///
/// The builder methods construct well-formed ops; ops pushed or deserialized
/// from elsewhere are checked by [`Circuit::validate`] and again when applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub qubits: usize,
    pub ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Circuit {
            qubits,
            ops: Vec::new(),
        }
    }

    fn push(
        &mut self,
        gate: Gate,
        controls: Vec<usize>,
        targets: Vec<usize>,
        theta: Option<f64>,
    ) -> &mut Self {
        self.ops.push(CircuitOp {
            gate,
            controls,
            targets,
            theta,
        });
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(Gate::H, vec![], vec![q], None)
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Gate::X, vec![], vec![q], None)
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Gate::Cx, vec![control], vec![target], None)
    }

    pub fn ccx(&mut self, control_a: usize, control_b: usize, target: usize) -> &mut Self {
        self.push(Gate::Ccx, vec![control_a, control_b], vec![target], None)
    }

    pub fn ch(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Gate::Ch, vec![control], vec![target], None)
    }

    pub fn cu3(&mut self, theta: f64, control: usize, target: usize) -> &mut Self {
        self.push(Gate::Cu3, vec![control], vec![target], Some(theta))
    }

    pub fn barrier(&mut self) -> &mut Self {
        self.push(Gate::Barrier, vec![], vec![], None)
    }

    /// Validate every op against this circuit's qubit count.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.qubits == 0 || self.qubits > super::MAX_QUBITS {
            return Err(SimError::QubitCount(self.qubits));
        }
        for op in &self.ops {
            op.validate(self.qubits)?;
        }
        Ok(())
    }

    /// Serialize to the circuit JSON format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization cannot fail")
    }

    /// Parse and validate a circuit from its JSON format. Unknown keys and
    /// malformed ops are rejected.
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let circuit: Circuit =
            serde_json::from_str(text).map_err(|e| SimError::Json(e.to_string()))?;
        circuit.validate()?;
        Ok(circuit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_produces_valid_ops() {
        let mut c = Circuit::new(3);
        c.h(0)
            .x(1)
            .cx(0, 1)
            .ccx(0, 1, 2)
            .ch(2, 0)
            .cu3(0.5, 1, 2)
            .barrier();
        assert!(c.validate().is_ok());
        assert_eq!(c.ops.len(), 7);
    }

    #[test]
    fn json_round_trip_preserves_circuit() {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).cu3(std::f64::consts::FRAC_PI_4, 1, 0);
        let parsed = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(parsed, c);
    }

    #[test]
    fn loader_rejects_unknown_keys() {
        let text = r#"{"qubits": 1, "ops": [{"gate": "h", "targets": [0], "color": "red"}]}"#;
        assert!(matches!(Circuit::from_json(text), Err(SimError::Json(_))));
        let text = r#"{"qubits": 1, "ops": [], "extra": 1}"#;
        assert!(matches!(Circuit::from_json(text), Err(SimError::Json(_))));
    }

    #[test]
    fn loader_rejects_unknown_gate() {
        let text = r#"{"qubits": 1, "ops": [{"gate": "t", "targets": [0]}]}"#;
        assert!(matches!(Circuit::from_json(text), Err(SimError::Json(_))));
    }

    #[test]
    fn validate_rejects_out_of_range_index() {
        let mut c = Circuit::new(2);
        c.h(5);
        assert_eq!(
            c.validate(),
            Err(SimError::QubitIndex {
                index: 5,
                num_qubits: 2
            })
        );
    }

    #[test]
    fn validate_rejects_control_target_collision() {
        let mut c = Circuit::new(2);
        c.cx(1, 1);
        assert_eq!(c.validate(), Err(SimError::IndexCollision(1)));
    }

    #[test]
    fn validate_rejects_missing_or_unexpected_theta() {
        let cu3_without = CircuitOp {
            gate: Gate::Cu3,
            controls: vec![0],
            targets: vec![1],
            theta: None,
        };
        assert_eq!(cu3_without.validate(2), Err(SimError::MissingTheta));

        let h_with = CircuitOp {
            gate: Gate::H,
            controls: vec![],
            targets: vec![0],
            theta: Some(1.0),
        };
        assert_eq!(h_with.validate(2), Err(SimError::UnexpectedTheta("h")));

        let cu3_nan = CircuitOp {
            gate: Gate::Cu3,
            controls: vec![0],
            targets: vec![1],
            theta: Some(f64::NAN),
        };
        assert!(matches!(
            cu3_nan.validate(2),
            Err(SimError::NonFiniteTheta(_))
        ));
    }

    #[test]
    fn barrier_is_accepted_with_no_operands() {
        let text = r#"{"qubits": 2, "ops": [{"gate": "barrier"}]}"#;
        let c = Circuit::from_json(text).unwrap();
        assert_eq!(c.ops[0].gate, Gate::Barrier);
    }
}
