use serde::{Deserialize, Serialize};

use crate::certifier::Theorem;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::measurements::{self, Measurement};
use crate::states::{self, DensityState};
use crate::tolerances;

pub const SCENARIO_VERSION: u32 = 1;

/// Complex entry as `[re, im]`.
pub type JsonComplex = [f64; 2];
pub type JsonVector = Vec<JsonComplex>;
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Random { rank: usize, seed: u64 },
    Pure { seed: u64 },
    MaximallyEntangled {},
    Product { factors: Vec<ProductFactor> },
    Explicit { matrix: JsonMatrix },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductFactor {
    pub dims: Vec<usize>,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementSpec {
    Basis { vectors: Vec<JsonVector> },
    Standard {},
    Dft {},
    Random { outcomes: usize, seed: u64 },
    Explicit { operators: Vec<JsonMatrix> },
    HaarBasis { seed: u64 },
}

fn default_tolerance() -> f64 {
    tolerances::THEOREM
}

fn default_concavity_trials() -> usize {
    100
}

/// A validated scenario. Build the concrete objects with [`ScenarioSpec::build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub version: u32,
    pub dims: Vec<usize>,
    pub state: StateSpec,
    pub measurement_a: MeasurementSpec,
    pub measurement_b: MeasurementSpec,
    #[serde(default)]
    pub theorems: Vec<Theorem>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization_delta: Option<f64>,
    #[serde(default = "default_concavity_trials")]
    pub concavity_trials: usize,
    #[serde(default)]
    pub concavity_seed: u64,
}

// Same shape with every required field optional, so that a missing field is
// reported as a validation error naming it.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    version: Option<u32>,
    dims: Option<Vec<usize>>,
    state: Option<StateSpec>,
    measurement_a: Option<MeasurementSpec>,
    measurement_b: Option<MeasurementSpec>,
    #[serde(default)]
    theorems: Vec<Theorem>,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    regularization_delta: Option<f64>,
    #[serde(default = "default_concavity_trials")]
    concavity_trials: usize,
    #[serde(default)]
    concavity_seed: u64,
}

/// Concrete objects a scenario describes.
#[derive(Debug, Clone)]
pub struct Instance {
    pub state: DensityState,
    pub a: Measurement,
    pub b: Measurement,
}

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::validation(field, "missing"))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let spec = ScenarioSpec {
        version: required(raw.version, "version")?,
        dims: required(raw.dims, "dims")?,
        state: required(raw.state, "state")?,
        measurement_a: required(raw.measurement_a, "measurement_a")?,
        measurement_b: required(raw.measurement_b, "measurement_b")?,
        theorems: raw.theorems,
        tolerance: raw.tolerance,
        regularization_delta: raw.regularization_delta,
        concavity_trials: raw.concavity_trials,
        concavity_seed: raw.concavity_seed,
    };
    spec.validate()?;
    Ok(spec)
}

fn complex(c: &JsonComplex) -> C64 {
    C64::new(c[0], c[1])
}

fn vector(v: &JsonVector) -> Vec<C64> {
    v.iter().map(complex).collect()
}

fn matrix(rows: &JsonMatrix) -> std::result::Result<ComplexMatrix, String> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err("rows have different lengths".into());
    }
    let data = rows.iter().flat_map(|r| r.iter().map(complex)).collect();
    ComplexMatrix::new(n, cols, data).map_err(|e| e.to_string())
}

fn build_state(spec: &StateSpec, dims: &[usize]) -> std::result::Result<DensityState, String> {
    let s = |r: Result<DensityState>| r.map_err(|e| e.to_string());
    match spec {
        StateSpec::Random { rank, seed } => s(states::random_density(dims, *rank, *seed)),
        StateSpec::Pure { seed } => s(states::random_pure(dims, *seed)),
        StateSpec::MaximallyEntangled {} => {
            if dims.len() != 2 || dims[0] != dims[1] {
                return Err(format!("maximally entangled state needs dims [d, d], got {dims:?}"));
            }
            s(states::maximally_entangled(dims[0]))
        }
        StateSpec::Product { factors } => {
            let mut acc: Option<DensityState> = None;
            for f in factors {
                let part = build_state(&f.state, &f.dims)?;
                acc = Some(match acc {
                    None => part,
                    Some(prev) => s(states::product_state(&prev, &part))?,
                });
            }
            let state = acc.ok_or("product needs at least one factor")?;
            if state.dims() != dims {
                return Err(format!("product factors give dims {:?}, scenario has {dims:?}", state.dims()));
            }
            Ok(state)
        }
        StateSpec::Explicit { matrix: m } => {
            let m = matrix(m)?;
            let tr = m.trace().re;
            if tr.is_nan() || (tr - 1.0).abs() > tolerances::SCENARIO_TRACE {
                return Err(format!("trace {tr} differs from 1 by more than {:e}", tolerances::SCENARIO_TRACE));
            }
            s(DensityState::new(m.scale(1.0 / tr), dims.to_vec()))
        }
    }
}

fn build_measurement(spec: &MeasurementSpec, d: usize) -> std::result::Result<Measurement, String> {
    let m = match spec {
        MeasurementSpec::Basis { vectors } => {
            measurements::from_basis(&vectors.iter().map(vector).collect::<Vec<_>>())
        }
        MeasurementSpec::Standard {} => measurements::standard_measurement(d),
        MeasurementSpec::Dft {} => measurements::dft_measurement(d),
        MeasurementSpec::Random { outcomes, seed } => measurements::random_measurement(d, *outcomes, *seed),
        MeasurementSpec::Explicit { operators } => {
            Measurement::new(operators.iter().map(matrix).collect::<std::result::Result<_, _>>()?)
        }
        MeasurementSpec::HaarBasis { seed } => measurements::haar_basis_measurement(d, *seed),
    }
    .map_err(|e| e.to_string())?;
    if m.dim() != d {
        return Err(format!("acts on dimension {}, first factor has dimension {d}", m.dim()));
    }
    Ok(m)
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::validation(
                "version",
                format!("unsupported version {}, expected {SCENARIO_VERSION}", self.version),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::validation("tolerance", "must be positive and finite"));
        }
        if let Some(d) = self.regularization_delta {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::validation("regularization_delta", "must lie in [0, 1]"));
            }
        }
        if let Some(t) = self.theorems.iter().find(|t| !scenario_theorem(**t)) {
            return Err(Error::validation("theorems", format!("{t} cannot be run from a scenario")));
        }
        self.build().map(|_| ())
    }

    /// Builds the state and both measurements.
    pub fn build(&self) -> Result<Instance> {
        if self.dims.is_empty() || self.dims.len() > 3 || self.dims.contains(&0) {
            return Err(Error::validation("dims", "expected one to three positive dimensions"));
        }
        let state = build_state(&self.state, &self.dims).map_err(|m| Error::validation("state", m))?;
        let a = build_measurement(&self.measurement_a, self.dims[0])
            .map_err(|m| Error::validation("measurement_a", m))?;
        let b = build_measurement(&self.measurement_b, self.dims[0])
            .map_err(|m| Error::validation("measurement_b", m))?;
        Ok(Instance { state, a, b })
    }

    /// Every seed the scenario mentions, in document order.
    pub fn seeds(&self) -> Vec<u64> {
        fn state_seeds(s: &StateSpec, out: &mut Vec<u64>) {
            match s {
                StateSpec::Random { seed, .. } | StateSpec::Pure { seed } => out.push(*seed),
                StateSpec::Product { factors } => factors.iter().for_each(|f| state_seeds(&f.state, out)),
                _ => {}
            }
        }
        let mut out = Vec::new();
        state_seeds(&self.state, &mut out);
        for m in [&self.measurement_a, &self.measurement_b] {
            if let MeasurementSpec::Random { seed, .. } | MeasurementSpec::HaarBasis { seed } = m {
                out.push(*seed);
            }
        }
        if self.theorems.contains(&Theorem::Concavity) {
            out.push(self.concavity_seed);
        }
        out
    }
}

/// Theorems a scenario can request; the trace-inequality ingredients take
/// their own operator inputs.
pub fn scenario_theorem(t: Theorem) -> bool {
    !matches!(
        t,
        Theorem::TripleGoldenThompson | Theorem::GibbsVariational | Theorem::OperatorJensen
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "dims": [2, 2],
        "state": {"kind": "maximally_entangled"},
        "measurement_a": {"kind": "basis", "vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
        "measurement_b": {"kind": "dft"},
        "theorems": ["two_space"]
    }"#;

    #[test]
    fn minimal_document_defaults_tolerance() {
        let spec = parse_scenario(MINIMAL).unwrap();
        assert_eq!(spec.tolerance, 1e-8);
        assert_eq!(spec.theorems, vec![Theorem::TwoSpace]);
        assert!(spec.regularization_delta.is_none());
    }

    #[test]
    fn missing_dims_names_the_field() {
        let text = MINIMAL.replace("\"dims\": [2, 2],", "");
        match parse_scenario(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "dims"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_location() {
        let text = "{\n  \"version\": 1,\n  \"dims\": [2, 2\n}";
        match parse_scenario(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"tolerence\": 1e-6,");
        assert!(matches!(parse_scenario(&text), Err(Error::Parse { .. })));
        let text = MINIMAL.replace("{\"kind\": \"dft\"}", "{\"kind\": \"dft\", \"seed\": 3}");
        assert!(matches!(parse_scenario(&text), Err(Error::Parse { .. })));
    }

    fn explicit_diag(trace: f64) -> String {
        let p = trace / 4.0;
        let rows: Vec<String> = (0..4)
            .map(|r| {
                let cells: Vec<String> =
                    (0..4).map(|c| if r == c { format!("[{p:.17e}, 0]") } else { "[0, 0]".into() }).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        MINIMAL.replace(
            "{\"kind\": \"maximally_entangled\"}",
            &format!("{{\"kind\": \"explicit\", \"matrix\": [{}]}}", rows.join(", ")),
        )
    }

    #[test]
    fn explicit_state_trace_gate() {
        parse_scenario(&explicit_diag(1.0 + 1e-9)).unwrap();
        parse_scenario(&explicit_diag(1.0 - 1e-9)).unwrap();
        match parse_scenario(&explicit_diag(0.9)) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "state"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn measurement_dimension_mismatch() {
        let text = MINIMAL.replace("{\"kind\": \"dft\"}", "{\"kind\": \"haar_basis\", \"seed\": 1}");
        parse_scenario(&text).unwrap();
        let text = MINIMAL.replace("\"dims\": [2, 2]", "\"dims\": [3, 3]");
        match parse_scenario(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "measurement_a"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_positive_tolerance() {
        let text = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"tolerance\": 0,");
        assert!(matches!(parse_scenario(&text), Err(Error::Validation { field, .. }) if field == "tolerance"));
    }

    #[test]
    fn product_state_dims_must_match() {
        let text = MINIMAL.replace(
            "{\"kind\": \"maximally_entangled\"}",
            r#"{"kind": "product", "factors": [
                {"dims": [2], "state": {"kind": "pure", "seed": 1}},
                {"dims": [2], "state": {"kind": "random", "rank": 2, "seed": 2}}]}"#,
        );
        let spec = parse_scenario(&text).unwrap();
        assert_eq!(spec.seeds(), vec![1, 2]);
        let bad = text.replace("\"dims\": [2, 2]", "\"dims\": [2, 3]");
        assert!(parse_scenario(&bad).is_err());
    }
}
