//! Experiment config files.
//!
//! A config is a TOML document of flat dotted keys. Tables are accepted and
//! flattened, so `[policy] algorithm = "bubble"` and
//! `policy.algorithm = "bubble"` are the same setting. Unknown keys, and keys
//! the chosen scheme does not use, are rejected by name.
//!
//! ```toml
//! format = 1
//! n = 100
//! reps = 100
//! seed = 7
//! counting = "swaps"           # or "all": swaps plus comparisons
//! dg.formula = "methods"       # or "fig6d"
//! dg.aggregate = "mean"        # or "sum"
//! values.scheme = "distinct"   # or "duplicated" with values.lo/hi/copies
//! policy.scheme = "pure"       # pure | chimera | opposed | pseudo-chimera
//! policy.algorithm = "bubble"
//! policy.mode = "cell-view"    # or "traditional"
//! frozen.count = 2
//! frozen.kind = "movable"      # or "immovable"
//! ```
//!
//! The canonical text lists every effective setting, sorted by key, and its
//! SHA-256 is the config digest written into traces and manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use cellsort_core::engine::ActivationOrder;
use cellsort_core::experiments::{
    opposed_directions_config, ChimeraPart, ExperimentConfig, FrozenPlacement, FrozenSpec, PolicyScheme,
    ValueScheme,
};
use cellsort_core::{Algorithm, Direction, FrozenKind, Mode, SchedulerConfig, Sensing};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::LabError;

pub const CONFIG_FORMAT: i64 = 1;

type Result<T> = std::result::Result<T, LabError>;

fn flatten(prefix: &str, table: Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            v => {
                out.insert(key, v);
            }
        }
    }
}

/// Settings not yet consumed. Whatever is left at the end was not wanted.
struct Fields(BTreeMap<String, Value>);

impl Fields {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key)
    }

    fn int(&mut self, key: &str) -> Result<Option<i64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(i)),
            Some(v) => Err(LabError::config(key, format!("expected an integer, got {}", v.type_str()))),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        match self.int(key)? {
            None => Ok(None),
            Some(i) => usize::try_from(i)
                .map(Some)
                .map_err(|_| LabError::config(key, format!("must be non-negative, got {i}"))),
        }
    }

    fn float(key: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            v => Err(LabError::config(key, format!("expected a number, got {}", v.type_str()))),
        }
    }

    fn array(&mut self, key: &str) -> Result<Option<Vec<Value>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(v) => Err(LabError::config(key, format!("expected an array, got {}", v.type_str()))),
        }
    }

    fn floats(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.array(key)?
            .map(|a| a.iter().map(|v| Self::float(key, v)).collect())
            .transpose()
    }

    fn counts(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        self.array(key)?
            .map(|a| {
                a.iter()
                    .map(|v| match v {
                        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                        v => Err(LabError::config(key, format!("expected non-negative integers, got {v}"))),
                    })
                    .collect()
            })
            .transpose()
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(v) => Err(LabError::config(key, format!("expected true or false, got {}", v.type_str()))),
        }
    }

    fn word(key: &str, v: &Value) -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            v => Err(LabError::config(key, format!("expected a string, got {}", v.type_str()))),
        }
    }

    fn named<T: FromStr>(&mut self, key: &str, choices: &str) -> Result<Option<T>> {
        self.take(key).map(|v| parse_named(key, &v, choices)).transpose()
    }

    fn named_list<T: FromStr>(&mut self, key: &str, choices: &str) -> Result<Option<Vec<T>>> {
        self.array(key)?
            .map(|a| a.iter().map(|v| parse_named(key, v, choices)).collect())
            .transpose()
    }

    fn finish(self) -> Result<()> {
        match self.0.into_keys().next() {
            None => Ok(()),
            Some(key) => Err(LabError::config(key, "unknown key, or not used by the chosen scheme")),
        }
    }
}

fn parse_named<T: FromStr>(key: &str, v: &Value, choices: &str) -> Result<T> {
    let s = Fields::word(key, v)?;
    s.parse()
        .map_err(|_| LabError::config(key, format!("unknown value {s:?}; expected one of {choices}")))
}

const ALGORITHMS: &str = "bubble, insertion, selection";
const DIRECTIONS: &str = "increasing, decreasing";

fn required<T>(key: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| LabError::config(key, "required"))
}

fn parse_parts(f: &mut Fields) -> Result<Vec<ChimeraPart>> {
    let algorithms: Vec<Algorithm> = required("policy.algotypes", f.named_list("policy.algotypes", ALGORITHMS)?)?;
    let k = algorithms.len();
    let directions = f
        .named_list("policy.directions", DIRECTIONS)?
        .unwrap_or_else(|| vec![Direction::Increasing; k]);
    let proportions = f.floats("policy.proportions")?.unwrap_or_else(|| vec![1.0 / k as f64; k]);
    if directions.len() != k {
        return Err(LabError::config("policy.directions", format!("{} entries for {k} algotypes", directions.len())));
    }
    if proportions.len() != k {
        return Err(LabError::config("policy.proportions", format!("{} entries for {k} algotypes", proportions.len())));
    }
    Ok(algorithms
        .into_iter()
        .zip(directions)
        .zip(proportions)
        .map(|((algorithm, direction), proportion)| ChimeraPart {
            algorithm,
            direction,
            proportion,
        })
        .collect())
}

/// Parse and validate a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = toml::from_str(text).map_err(|e| LabError::config("format", format!("not valid TOML: {e}")))?;
    config_from_table(table)
}

/// Same as [`parse_config`] for an already parsed document.
pub fn config_from_table(table: Table) -> Result<ExperimentConfig> {
    let mut flat = BTreeMap::new();
    flatten("", table, &mut flat);
    let mut f = Fields(flat);

    match f.int("format")? {
        Some(CONFIG_FORMAT) => {}
        Some(v) => return Err(LabError::config("format", format!("unsupported config format {v}; this build reads {CONFIG_FORMAT}"))),
        None => return Err(LabError::config("format", format!("required; use format = {CONFIG_FORMAT}"))),
    }

    let scheme: String = required("policy.scheme", f.take("policy.scheme").map(|v| Fields::word("policy.scheme", &v)).transpose()?)?;
    let mut opposed = false;
    let policy = match scheme.as_str() {
        "pure" => PolicyScheme::Pure {
            algorithm: required("policy.algorithm", f.named("policy.algorithm", ALGORITHMS)?)?,
            mode: f.named("policy.mode", "cell-view, traditional")?.unwrap_or(Mode::CellView),
            direction: f.named("policy.direction", DIRECTIONS)?.unwrap_or(Direction::Increasing),
        },
        "chimera" => PolicyScheme::Chimera(parse_parts(&mut f)?),
        "opposed" => {
            opposed = true;
            PolicyScheme::Chimera(parse_parts(&mut f)?)
        }
        "pseudo-chimera" => {
            let algorithm = required("policy.algorithm", f.named("policy.algorithm", ALGORITHMS)?)?;
            let labels = f.count("policy.labels")?.unwrap_or(2);
            let labels = u8::try_from(labels).map_err(|_| LabError::config("policy.labels", "at most 255 labels"))?;
            PolicyScheme::PseudoChimera { algorithm, labels }
        }
        other => {
            return Err(LabError::config(
                "policy.scheme",
                format!("unknown scheme {other:?}; expected one of pure, chimera, opposed, pseudo-chimera"),
            ))
        }
    };

    let mut config = ExperimentConfig::new(policy);
    if let Some(n) = f.count("n")? {
        config.n = n;
    }
    if let Some(reps) = f.count("reps")? {
        config.reps = reps;
    }
    if let Some(seed) = f.int("seed")? {
        config.seed = u64::try_from(seed).map_err(|_| LabError::config("seed", "must be non-negative"))?;
    }
    if let Some(c) = f.named("counting", "swaps, all")? {
        config.counting = c;
    }
    if let Some(d) = f.named("dg.formula", "methods, fig6d")? {
        config.dg_formula = d;
    }
    if let Some(d) = f.named("dg.aggregate", "mean, sum")? {
        config.dg_aggregate = d;
    }

    let values = f.take("values.scheme").map(|v| Fields::word("values.scheme", &v)).transpose()?;
    config.values = match values.as_deref() {
        None | Some("distinct") => ValueScheme::DistinctPermutation,
        Some("duplicated") => ValueScheme::DuplicatedRange {
            lo: required("values.lo", f.int("values.lo")?)?,
            hi: required("values.hi", f.int("values.hi")?)?,
            copies: required("values.copies", f.count("values.copies")?)?,
        },
        Some(other) => {
            return Err(LabError::config(
                "values.scheme",
                format!("unknown scheme {other:?}; expected distinct or duplicated"),
            ))
        }
    };
    if let Some(band) = f.floats("values.initial_sortedness")? {
        let [lo, hi] = band[..] else {
            return Err(LabError::config("values.initial_sortedness", "expected [lo, hi]"));
        };
        config.initial_sortedness = Some((lo, hi));
    }

    let indices = f.counts("frozen.indices")?;
    let placement = f.take("frozen.placement").map(|v| Fields::word("frozen.placement", &v)).transpose()?;
    let placement = match (placement.as_deref(), indices) {
        (None | Some("random"), None) => FrozenPlacement::UniformRandom,
        (None | Some("explicit"), Some(ix)) => FrozenPlacement::ExplicitIndices(ix),
        (Some("random"), Some(_)) => {
            return Err(LabError::config("frozen.indices", "only used with frozen.placement = \"explicit\""))
        }
        (Some("explicit"), None) => return Err(LabError::config("frozen.indices", "required for explicit placement")),
        (Some(other), _) => {
            return Err(LabError::config(
                "frozen.placement",
                format!("unknown placement {other:?}; expected random or explicit"),
            ))
        }
    };
    let count = match (&placement, f.count("frozen.count")?) {
        (_, Some(c)) => c,
        (FrozenPlacement::ExplicitIndices(ix), None) => ix.len(),
        (FrozenPlacement::UniformRandom, None) => 0,
    };
    config.frozen = FrozenSpec {
        count,
        kind: f.named("frozen.kind", "movable, immovable")?.unwrap_or(FrozenKind::FrozenMovable),
        placement,
        same_positions_every_run: f.boolean("frozen.same_positions")?.unwrap_or(false),
    };

    let mut scheduler = SchedulerConfig::default();
    if let Some(w) = f.int("scheduler.quiescence_window")? {
        scheduler.quiescence_window =
            u32::try_from(w).map_err(|_| LabError::config("scheduler.quiescence_window", "out of range"))?;
    }
    if let Some(m) = f.int("scheduler.max_activations")? {
        scheduler.max_activations =
            Some(u64::try_from(m).map_err(|_| LabError::config("scheduler.max_activations", "must be non-negative"))?);
    }
    if let Some(o) = f.named::<ActivationOrder>("scheduler.order", "shuffled, fixed")? {
        scheduler.activation_order = o;
    }
    if let Some(s) = f.named::<Sensing>("scheduler.sensing", "remembered, changes, recheck")? {
        scheduler.sensing = s;
    }
    config.scheduler = scheduler;
    f.finish()?;

    if opposed {
        config = opposed_directions_config(&config)?;
    }
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_config(&text)
}

fn s(v: &str) -> Value {
    Value::String(v.to_owned())
}

fn int(v: impl TryInto<i64>) -> Value {
    Value::Integer(v.try_into().unwrap_or(i64::MAX))
}

fn list<T>(items: &[T], f: impl Fn(&T) -> Value) -> Value {
    Value::Array(items.iter().map(f).collect())
}

/// Every effective setting as sorted `key = value` lines. Parsing the
/// canonical text gives back the same config.
pub fn canonical_text(config: &ExperimentConfig) -> String {
    let mut kv: BTreeMap<&str, Value> = BTreeMap::new();
    kv.insert("format", int(CONFIG_FORMAT));
    kv.insert("n", int(config.n));
    kv.insert("reps", int(config.reps));
    kv.insert("seed", int(config.seed));
    kv.insert("counting", s(config.counting.name()));
    kv.insert("dg.formula", s(config.dg_formula.name()));
    kv.insert("dg.aggregate", s(config.dg_aggregate.name()));
    match &config.values {
        ValueScheme::DistinctPermutation => {
            kv.insert("values.scheme", s("distinct"));
        }
        ValueScheme::DuplicatedRange { lo, hi, copies } => {
            kv.insert("values.scheme", s("duplicated"));
            kv.insert("values.lo", int(*lo));
            kv.insert("values.hi", int(*hi));
            kv.insert("values.copies", int(*copies));
        }
    }
    if let Some((lo, hi)) = config.initial_sortedness {
        kv.insert("values.initial_sortedness", Value::Array(vec![Value::Float(lo), Value::Float(hi)]));
    }
    match &config.policy {
        PolicyScheme::Pure {
            algorithm,
            mode,
            direction,
        } => {
            kv.insert("policy.scheme", s("pure"));
            kv.insert("policy.algorithm", s(algorithm.name()));
            kv.insert("policy.mode", s(mode.name()));
            kv.insert("policy.direction", s(direction.name()));
        }
        PolicyScheme::Chimera(parts) => {
            kv.insert("policy.scheme", s("chimera"));
            kv.insert("policy.algotypes", list(parts, |p| s(p.algorithm.name())));
            kv.insert("policy.directions", list(parts, |p| s(p.direction.name())));
            kv.insert("policy.proportions", list(parts, |p| Value::Float(p.proportion)));
        }
        PolicyScheme::PseudoChimera { algorithm, labels } => {
            kv.insert("policy.scheme", s("pseudo-chimera"));
            kv.insert("policy.algorithm", s(algorithm.name()));
            kv.insert("policy.labels", int(*labels));
        }
    }
    let fz = &config.frozen;
    kv.insert("frozen.count", int(fz.count));
    kv.insert("frozen.kind", s(fz.kind.name()));
    kv.insert("frozen.same_positions", Value::Boolean(fz.same_positions_every_run));
    match &fz.placement {
        FrozenPlacement::UniformRandom => {
            kv.insert("frozen.placement", s("random"));
        }
        FrozenPlacement::ExplicitIndices(ix) => {
            kv.insert("frozen.placement", s("explicit"));
            kv.insert("frozen.indices", list(ix, |&i| int(i)));
        }
    }
    let sc = &config.scheduler;
    kv.insert("scheduler.quiescence_window", int(sc.quiescence_window));
    if let Some(m) = sc.max_activations {
        kv.insert("scheduler.max_activations", int(m));
    }
    kv.insert("scheduler.order", s(sc.activation_order.name()));
    kv.insert("scheduler.sensing", s(sc.sensing.name()));

    let mut out = String::new();
    for (k, v) in kv {
        writeln!(out, "{k} = {v}").expect("writing to a String");
    }
    out
}

/// Lowercase hex SHA-256 of the canonical text.
pub fn config_digest(config: &ExperimentConfig) -> String {
    let hash = Sha256::digest(canonical_text(config).as_bytes());
    hash.iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").expect("writing to a String");
        s
    })
}
