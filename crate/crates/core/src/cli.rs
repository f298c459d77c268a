//! Request/response layer behind the `quadklein` binary.
//!
//! A request is a tagged JSON object (`{"command": "klein", "d": 10, "n": 3}`);
//! the binary builds one from its flags. Output is a JSON value with sorted
//! keys, rationals as strings and elements in canonical `a+b*s` form.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::arith;
use crate::classfield::{self, ClassOptions};
use crate::density::{self, PrimeSet};
use crate::embed::{self, ConjugatedEmbedding, Mat2};
use crate::error::{Error, Result};
use crate::ideal::{self, FracIdeal};
use crate::invar::{self, FiberPoint, FiberSubject};
use crate::klein;
use crate::qfield::{self, make_field, QuadraticField};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CommandRequest {
    Field {
        d: i64,
    },
    Classgroup {
        d: i64,
        #[serde(default)]
        narrow: bool,
        #[serde(default)]
        allow_large: bool,
    },
    Klein {
        d: i64,
        n: usize,
    },
    EmbedCheck {
        d: i64,
        n: usize,
        matrix: String,
    },
    EmbedReduce {
        d: i64,
        matrix: String,
    },
    EmbedSearch {
        d: i64,
        n: usize,
        #[serde(default = "default_height")]
        height: i64,
    },
    EmbedCover {
        d: i64,
        n: usize,
        matrix: String,
    },
    Invariants {
        d: i64,
        n: usize,
        #[serde(default)]
        matrix: Option<String>,
        #[serde(default)]
        degree_bound: Option<u32>,
        #[serde(default)]
        invert: Option<String>,
        #[serde(default)]
        relations: Vec<String>,
    },
    Fibers {
        d: i64,
        n: usize,
        #[serde(default)]
        delta: Option<String>,
        #[serde(default)]
        matrix: Option<String>,
        #[serde(default)]
        primes: Vec<u64>,
    },
    Density {
        d: i64,
        delta: String,
        bound: u64,
        #[serde(default)]
        dirichlet: Option<String>,
        #[serde(default)]
        shards: Option<usize>,
    },
}

fn default_height() -> i64 {
    3
}

/// Result of one command: the JSON document and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: Value,
    pub exit_code: i32,
}

/// Run a request; errors become `{"error": {"kind", "message"}}` with exit 1
/// (domain) or 2 (search caps).
pub fn run(request: &CommandRequest) -> Outcome {
    match dispatch(request) {
        Ok(output) => Outcome { output, exit_code: 0 },
        Err(e) => error_outcome(&e),
    }
}

/// Parse a JSON request and run it. Unknown keys are rejected.
pub fn run_json(text: &str) -> Outcome {
    match serde_json::from_str::<CommandRequest>(text) {
        Ok(req) => run(&req),
        Err(e) => error_outcome(&Error::Parse(e.to_string())),
    }
}

pub fn error_outcome(e: &Error) -> Outcome {
    Outcome {
        output: json!({"error": {"kind": e.kind(), "message": e.to_string()}}),
        exit_code: if e.is_resource_cap() { 2 } else { 1 },
    }
}

fn dispatch(req: &CommandRequest) -> Result<Value> {
    match req {
        CommandRequest::Field { d } => field(*d),
        CommandRequest::Classgroup { d, narrow, allow_large } => classgroup(*d, *narrow, *allow_large),
        CommandRequest::Klein { d, n } => {
            let k = make_field(*d)?;
            Ok(serde_json::to_value(klein::klein_report(&k, *n)?).expect("serializable"))
        }
        CommandRequest::EmbedCheck { d, n, matrix } => embed_check(*d, *n, matrix),
        CommandRequest::EmbedReduce { d, matrix } => embed_reduce(*d, matrix),
        CommandRequest::EmbedSearch { d, n, height } => {
            let k = make_field(*d)?;
            Ok(match embed::find_nonstandard_embedding(&k, *n, *height)? {
                Some(e) => json!({"found": true, "matrix": e.a.to_strings(), "n": e.n, "det": e.delta.to_string()}),
                None => json!({"found": false}),
            })
        }
        CommandRequest::EmbedCover { d, n, matrix } => {
            let e = embedding(*d, *n, matrix)?;
            let patches = embed::zariski_trivialization(&e)?;
            Ok(json!({
                "patches": patches.iter().map(|p| json!({
                    "s": p.s.to_string(),
                    "lambda": [p.lambda.0.to_string(), p.lambda.1.to_string()],
                    "conjugator": p.conjugator.to_strings(),
                })).collect::<Vec<_>>(),
            }))
        }
        CommandRequest::Invariants {
            d,
            n,
            matrix,
            degree_bound,
            invert,
            relations,
        } => invariants(*d, *n, matrix.as_deref(), *degree_bound, invert.as_deref(), relations),
        CommandRequest::Fibers {
            d,
            n,
            delta,
            matrix,
            primes,
        } => fibers(*d, *n, delta.as_deref(), matrix.as_deref(), primes),
        CommandRequest::Density {
            d,
            delta,
            bound,
            dirichlet,
            shards,
        } => density_cmd(*d, delta, *bound, dirichlet.as_deref(), *shards),
    }
}

fn field(d: i64) -> Result<Value> {
    let k = make_field(d)?;
    let data = classfield::ray_class_data(&k)?;
    let unit = if k.is_real() {
        let u = qfield::fundamental_unit(&k)?;
        json!({"epsilon": u.fundamental_unit.to_string(), "norm": u.unit_norm})
    } else {
        Value::Null
    };
    Ok(json!({
        "d": k.d(),
        "disc": k.disc(),
        "omega_kind": k.omega_kind(),
        "signature": {"r": data.r, "t": data.t},
        "minkowski_bound": k.minkowski_bound(),
        "h": data.h,
        "h1": data.h1,
        "fundamental_unit": unit,
    }))
}

fn classgroup(d: i64, narrow: bool, allow_large: bool) -> Result<Value> {
    let k = make_field(d)?;
    let opts = ClassOptions { allow_large };
    let g = if narrow {
        classfield::narrow_class_group_with(&k, opts)?
    } else {
        classfield::class_group_with(&k, opts)?
    };
    Ok(json!({
        "narrow": narrow,
        "order": g.order(),
        "two_rank": g.two_rank(),
        "group": g.to_json(),
    }))
}

fn embedding(d: i64, n: usize, matrix: &str) -> Result<ConjugatedEmbedding> {
    let k = make_field(d)?;
    ConjugatedEmbedding::new(Mat2::parse(&k, matrix)?, n)
}

fn embed_check(d: i64, n: usize, matrix: &str) -> Result<Value> {
    let k = make_field(d)?;
    let a = Mat2::parse(&k, matrix)?;
    let det = a.det();
    let e = match ConjugatedEmbedding::new(a, n) {
        Ok(e) => e,
        Err(Error::NotIntegral { row, col, power, value }) => {
            return Ok(json!({
                "det": det.to_string(),
                "integral": false,
                "first_nonintegral": {"row": row, "col": col, "power": power, "value": value},
            }))
        }
        Err(e) => return Err(e),
    };
    let b = embed::is_conjugate_to_standard(&e)?;
    Ok(json!({
        "det": det.to_string(),
        "integral": true,
        "rho": e.rho.to_strings(),
        "column_ideals": [e.column_ideals.0.to_string(), e.column_ideals.1.to_string()],
        "conjugate_to_standard": b.is_some(),
        "conjugator": b.map(|m| m.to_strings()),
    }))
}

fn embed_reduce(d: i64, matrix: &str) -> Result<Value> {
    let k = make_field(d)?;
    let r = embed::reduce_conjugator(&Mat2::parse(&k, matrix)?)?;
    Ok(json!({
        "a_reduced": r.a_reduced.to_strings(),
        "steps": r.steps.iter().map(|s| json!({
            "prime": s.prime.to_string(),
            "generator": s.generator.to_string(),
            "line": s.line,
            "index": s.index,
        })).collect::<Vec<_>>(),
    }))
}

fn invariants(
    d: i64,
    n: usize,
    matrix: Option<&str>,
    degree_bound: Option<u32>,
    invert: Option<&str>,
    relations: &[String],
) -> Result<Value> {
    let k = make_field(d)?;
    let e = match matrix {
        Some(m) => ConjugatedEmbedding::new(Mat2::parse(&k, m)?, n)?,
        None => ConjugatedEmbedding::new(Mat2::identity(&k), n)?,
    };
    let pres = match invert {
        Some(s) => invar::localized_presentation(&e, &k.parse_element(s)?)?,
        None => invar::algebra_generators(&e.rho, degree_bound.unwrap_or(2 * n as u32))?,
    };
    let checks = invar::verify_relations(&pres, &k, relations)?;
    Ok(json!({
        "presentation": pres.to_json(),
        "relation_checks": relations.iter().zip(checks).map(|(r, ok)| json!({"relation": r, "holds": ok})).collect::<Vec<_>>(),
    }))
}

fn prime_label(p: &FracIdeal) -> String {
    p.to_string()
}

fn fibers(d: i64, n: usize, delta: Option<&str>, matrix: Option<&str>, primes: &[u64]) -> Result<Value> {
    let k = make_field(d)?;
    if delta.is_some() && matrix.is_some() {
        return Err(Error::InvalidArgument("give either --delta or --matrix".into()));
    }
    let ideals: Vec<FracIdeal> = primes
        .iter()
        .filter(|p| arith::is_prime(**p))
        .flat_map(|p| ideal::primes_above(*p, &k))
        .collect();
    if let Some(m) = matrix {
        let e = ConjugatedEmbedding::new(Mat2::parse(&k, m)?, n)?;
        let pres = invar::algebra_generators(&e.rho, 2 * n as u32)?;
        let mut rows = Vec::new();
        for p in &ideals {
            rows.push(fiber_row(p, invar::fiber_from_presentation(&pres, &k, FiberPoint::Prime(p))));
        }
        let generic = invar::fiber_from_presentation(&pres, &k, FiberPoint::Generic)?;
        return Ok(json!({"generic": generic, "primes": rows}));
    }
    let twist = match delta {
        Some(t) => {
            let ext = classfield::find_extension(&k, &k.parse_element(t)?)?;
            embed::twist_from_extension(&k, Some(&ext), n)
        }
        None => klein::TwistDescriptor::standard(&k),
    };
    let part = klein::fiber_partition(&k, &twist, n);
    let mut rows = Vec::new();
    for p in &ideals {
        rows.push(fiber_row(p, invar::fiber_type(FiberSubject::Twist(&twist), FiberPoint::Prime(p), n)));
    }
    let generic = invar::fiber_type(FiberSubject::Twist(&twist), FiberPoint::Generic, n)?;
    let places = if n >= 3 {
        serde_json::to_value(klein::archimedean_report(&k, &twist, n)?).expect("serializable")
    } else {
        Value::Null
    };
    Ok(json!({
        "sigma_a": part.sigma_a.describe(),
        "sigma_b": part.sigma_b.describe(),
        "predicted_densities": [part.densities.0, part.densities.1],
        "generic": generic,
        "places": places,
        "primes": rows,
    }))
}

fn fiber_row(p: &FracIdeal, r: Result<invar::FiberReport>) -> Value {
    match r {
        Ok(rep) => json!({"prime": prime_label(p), "fiber": rep}),
        Err(e) => json!({"prime": prime_label(p), "error": {"kind": e.kind(), "message": e.to_string()}}),
    }
}

fn density_cmd(d: i64, delta: &str, bound: u64, dirichlet: Option<&str>, shards: Option<usize>) -> Result<Value> {
    let k: QuadraticField = make_field(d)?;
    let ext = classfield::find_extension(&k, &k.parse_element(delta)?)?;
    let res = density::splitting_census_sharded(&k, &ext, bound, shards.unwrap_or_else(density::default_shards))?;
    let dq = match dirichlet {
        Some(s) => {
            let s = arith::parse_rational(s).ok_or_else(|| Error::Parse(format!("bad exponent {s}")))?;
            Some(density::dirichlet_quotient(&k, &ext, &s, bound, PrimeSet::Split)?)
        }
        None => None,
    };
    Ok(json!({
        "bound": res.bound_x,
        "delta": ext.delta.to_string(),
        "split": res.counts.split,
        "inert": res.counts.inert,
        "ramified": res.counts.ramified,
        "total": res.counts.total(),
        "natural_density_split": arith::rational_to_string(&res.natural_density_split),
        "dirichlet_quotient_split": dq.as_ref().map(|v| v.to_string_value()),
        "dirichlet_quotient_split_approx": dq.as_ref().map(|v| v.to_f64()),
    }))
}

/// One-line CSV rendering of a density report.
pub fn density_csv(v: &Value) -> String {
    let cols = ["bound", "delta", "split", "inert", "ramified", "total", "natural_density_split", "dirichlet_quotient_split_approx"];
    let cell = |c: &str| match &v[c] {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    format!("{}\n{}\n", cols.join(","), cols.iter().map(|c| cell(c)).collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let out = run_json(r#"{"command": "field", "d": 10, "extra": 1}"#);
        assert_eq!(out.exit_code, 1);
        assert_eq!(out.output["error"]["kind"], "Parse");
    }

    #[test]
    fn sample_requests() {
        let out = run_json(r#"{"command": "klein", "d": 10, "n": 3}"#);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.output["singleton"], false);
        assert_eq!(out.output["lower_bound"], 2);
        let out = run_json(r#"{"command": "embed-check", "d": 10, "n": 4, "matrix": "[[3,\"4+s\"],[\"4-s\",3]]"}"#);
        assert_eq!(out.output["integral"], true);
        assert_eq!(out.output["conjugate_to_standard"], false);
        let out = run_json(r#"{"command": "field", "d": 12}"#);
        assert_eq!(out.exit_code, 1);
        assert_eq!(out.output["error"]["kind"], "NotSquarefree");
    }
}
