//! Channel files and report schemas.
//!
//! A channel file is one JSON object. Classical channels are given either
//! explicitly,
//!
//! ```json
//! {"input_labels": ["a", "b"], "output_labels": ["0", "1"], "matrix": [[0.9, 0.1], [0.2, 0.8]]}
//! ```
//!
//! or by shorthand: `{"type": "erasure", "r": 3, "eta": 0.5}`,
//! `{"type": "generalized_erasure", "blocks": [["1","2"],["3","4"]], "etas": [0.9, 0.95]}`
//! (a block may also be a size), `{"type": "identity", "r": 3}`,
//! `{"type": "constant", "r": 3, "distribution": [0.5, 0.5]}`.
//!
//! Kraus channels are `{"in_dim": 2, "out_dim": 2, "kraus": [{"re": [[..]], "im": [[..]]}]}`
//! or `{"type": "quantum_erasure", "dim": 3, "eta": 0.5}`,
//! `{"type": "coarse_graining", "dim": 4, "blocks": [[0, 1], [2, 3]]}`,
//! `{"type": "partial_trace", "dim_z": 2, "dim_w": 2}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::classical::{Alphabet, ClassicalChannel};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::quantum::{
    make_coarse_graining, make_quantum_erasure, partial_trace_coarse_graining, DensityMatrix,
    KrausChannel, MatrixJson,
};

#[derive(Clone, Debug)]
pub enum ParsedChannel {
    Classical(ClassicalChannel),
    Quantum(KrausChannel),
}

/// Prefixes a domain error with the file field it came from.
fn in_field(field: &str, e: Error) -> Error {
    match e {
        Error::Validation(s) => Error::Validation(format!("field `{field}`: {s}")),
        Error::Dimension(s) => Error::Dimension(format!("field `{field}`: {s}")),
        Error::Partition(s) => Error::Partition(format!("field `{field}`: {s}")),
        Error::Parse(s) => Error::Parse(format!("field `{field}`: {s}")),
        other => other,
    }
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
}

impl<'a> Fields<'a> {
    fn new(value: &'a Value, allowed: &[&str]) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown field `{k}`")));
        }
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Result<&'a Value> {
        self.map
            .get(key)
            .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
    }

    fn opt(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.as_u64()
            .and_then(|n| usize::try_from(n).ok())
            .ok_or_else(|| Error::Parse(format!("field `{key}`: expected a nonnegative integer, got {v}")))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        v.as_f64()
            .ok_or_else(|| Error::Parse(format!("field `{key}`: expected a number, got {v}")))
    }

    fn array(&self, key: &str) -> Result<&'a Vec<Value>> {
        let v = self.get(key)?;
        v.as_array()
            .ok_or_else(|| Error::Parse(format!("field `{key}`: expected an array")))
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        numbers(self.array(key)?, key)
    }

    fn labels(&self, key: &str) -> Result<Vec<String>> {
        self.array(key)?
            .iter()
            .enumerate()
            .map(|(i, v)| label(v).ok_or_else(|| Error::Parse(format!("field `{key}[{i}]`: expected a label"))))
            .collect()
    }

    fn matrix(&self, key: &str) -> Result<Vec<Vec<f64>>> {
        self.array(key)?
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let name = format!("{key}[{i}]");
                row.as_array()
                    .ok_or_else(|| Error::Parse(format!("field `{name}`: expected an array")))
                    .and_then(|r| numbers(r, &name))
            })
            .collect()
    }
}

fn numbers(values: &[Value], key: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| Error::Parse(format!("field `{key}[{i}]`: expected a number, got {v}")))
        })
        .collect()
}

fn label(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

pub fn parse_channel_str(text: &str) -> Result<ParsedChannel> {
    let value = parse_value(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    match obj.get("type") {
        Some(Value::String(t)) => parse_shorthand(t, &value),
        Some(other) => Err(Error::Parse(format!("field `type`: expected a string, got {other}"))),
        None if obj.contains_key("kraus") => parse_kraus(&value).map(ParsedChannel::Quantum),
        None => parse_explicit(&value).map(ParsedChannel::Classical),
    }
}

fn parse_shorthand(kind: &str, value: &Value) -> Result<ParsedChannel> {
    let classical = match kind {
        "erasure" => {
            let f = Fields::new(value, &["type", "r", "eta"])?;
            ClassicalChannel::erasure(f.usize("r")?, f.f64("eta")?)
        }
        "identity" => {
            let f = Fields::new(value, &["type", "r"])?;
            ClassicalChannel::identity(f.usize("r")?)
        }
        "constant" => {
            let f = Fields::new(value, &["type", "r", "distribution"])?;
            let dist = match f.opt("distribution") {
                Some(_) => f.f64_list("distribution")?,
                None => vec![1.0],
            };
            ClassicalChannel::constant(f.usize("r")?, &dist).map_err(|e| in_field("distribution", e))
        }
        "generalized_erasure" => {
            let f = Fields::new(value, &["type", "blocks", "etas"])?;
            let blocks = generalized_blocks(f.array("blocks")?)?;
            ClassicalChannel::generalized_erasure(&blocks, &f.f64_list("etas")?)
        }
        "quantum_erasure" => {
            let f = Fields::new(value, &["type", "dim", "eta"])?;
            return Ok(ParsedChannel::Quantum(make_quantum_erasure(f.usize("dim")?, f.f64("eta")?)?));
        }
        "coarse_graining" => {
            let f = Fields::new(value, &["type", "dim", "blocks"])?;
            let dim = f.usize("dim")?;
            let blocks = f
                .array("blocks")?
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    b.as_array()
                        .and_then(|b| b.iter().map(|x| x.as_u64().map(|x| x as usize)).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| Error::Parse(format!("field `blocks[{i}]`: expected an array of indices")))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = Partition::new(dim, blocks).map_err(|e| in_field("blocks", e))?;
            let cg = make_coarse_graining(&p, dim)?;
            return Ok(ParsedChannel::Quantum(cg.channel().clone()));
        }
        "partial_trace" => {
            let f = Fields::new(value, &["type", "dim_z", "dim_w"])?;
            let cg = partial_trace_coarse_graining(f.usize("dim_z")?, f.usize("dim_w")?)?;
            return Ok(ParsedChannel::Quantum(cg.channel().clone()));
        }
        other => return Err(Error::Parse(format!("field `type`: unknown channel type `{other}`"))),
    };
    classical.map(ParsedChannel::Classical)
}

/// Blocks given as label arrays or as sizes; sizes get consecutive numbers
/// continuing from the labels before them.
fn generalized_blocks(values: &[Value]) -> Result<Vec<Vec<String>>> {
    let mut next = 1usize;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let block: Vec<String> = if let Some(size) = v.as_u64() {
                (0..size as usize).map(|j| (next + j).to_string()).collect()
            } else {
                v.as_array()
                    .and_then(|b| b.iter().map(label).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| {
                        Error::Parse(format!("field `blocks[{i}]`: expected a size or an array of labels"))
                    })?
            };
            next += block.len();
            Ok(block)
        })
        .collect()
}

fn parse_explicit(value: &Value) -> Result<ClassicalChannel> {
    let f = Fields::new(value, &["input_labels", "output_labels", "matrix"])?;
    let input = Alphabet::new(f.labels("input_labels")?).map_err(|e| in_field("input_labels", e))?;
    let output = Alphabet::new(f.labels("output_labels")?).map_err(|e| in_field("output_labels", e))?;
    let rows = f.matrix("matrix")?;
    ClassicalChannel::new(input, output, rows).map_err(|e| in_field("matrix", e))
}

fn parse_kraus(value: &Value) -> Result<KrausChannel> {
    let f = Fields::new(value, &["in_dim", "out_dim", "kraus"])?;
    let in_dim = f.usize("in_dim")?;
    let out_dim = f.usize("out_dim")?;
    let ops = f
        .array("kraus")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let name = format!("kraus[{i}]");
            let m: MatrixJson = serde_json::from_value(v.clone())
                .map_err(|e| Error::Parse(format!("field `{name}`: {e}")))?;
            m.to_matrix(&name)
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(in_dim, out_dim, ops).map_err(|e| in_field("kraus", e))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn parse_channel_file(path: &Path) -> Result<ParsedChannel> {
    parse_channel_str(&read(path)?)
}

pub fn parse_classical_file(path: &Path) -> Result<ClassicalChannel> {
    match parse_channel_file(path)? {
        ParsedChannel::Classical(ch) => Ok(ch),
        ParsedChannel::Quantum(_) => Err(Error::Parse(format!(
            "{}: expected a classical channel, found a Kraus channel",
            path.display()
        ))),
    }
}

pub fn parse_density_str(text: &str) -> Result<DensityMatrix> {
    let m: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid density matrix: {e}")))?;
    DensityMatrix::new(m.to_matrix("state")?)
}

/// Explicit-form JSON of a classical channel.
pub fn classical_to_json(ch: &ClassicalChannel) -> Value {
    serde_json::json!({
        "input_labels": ch.input().labels(),
        "output_labels": ch.output().labels(),
        "matrix": ch.rows().collect::<Vec<_>>(),
    })
}

pub fn kraus_to_json(ch: &KrausChannel) -> Value {
    serde_json::json!({
        "in_dim": ch.in_dim(),
        "out_dim": ch.out_dim(),
        "kraus": ch.kraus().iter().map(MatrixJson::from_matrix).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityReport {
    pub x: String,
    pub x_hat: String,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductReport {
    pub k: usize,
    pub x: Vec<String>,
    pub x_hat: Vec<String>,
    pub hamming: usize,
    pub fidelity: f64,
}

/// One value of the block-power bound; integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundPoint {
    pub k: usize,
    pub numerator: String,
    pub denominator: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockPowerReport {
    pub block_sizes: Vec<usize>,
    pub points: Vec<BoundPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumCompressReport {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Kernel dimension of the compressor placed in `ℂ^in_dim`.
    pub kernel_dim: usize,
    pub compressibility: f64,
    /// Set when the compressor was derived from a classical ε-partition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<String>>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical(text: &str) -> ClassicalChannel {
        match parse_channel_str(text).unwrap() {
            ParsedChannel::Classical(c) => c,
            _ => panic!("expected classical"),
        }
    }

    #[test]
    fn erasure_shorthand() {
        let ch = classical(r#"{"type":"erasure","r":3,"eta":0.5}"#);
        assert_eq!((ch.n_inputs(), ch.n_outputs()), (3, 4));
    }

    #[test]
    fn generalized_blocks_by_size_or_label() {
        let a = classical(r#"{"type":"generalized_erasure","blocks":[2,2],"etas":[0.9,0.95]}"#);
        let b = classical(r#"{"type":"generalized_erasure","blocks":[["1","2"],[3,4]],"etas":[0.9,0.95]}"#);
        assert_eq!(a, b);
        assert_eq!(a.input().labels(), &["1", "2", "3", "4"]);
    }

    #[test]
    fn bad_row_named() {
        let err = parse_channel_str(
            r#"{"input_labels":["a","b"],"output_labels":["0","1"],"matrix":[[1,0],[0.5,0.4]]}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Validation(_)));
        assert!(msg.contains("field `matrix`") && msg.contains("row 1 (`b`)"), "{msg}");
    }

    #[test]
    fn schema_errors_name_field() {
        let cases = [
            (r#"{"type":"erasure","r":3}"#, "missing field `eta`"),
            (r#"{"type":"erasure","r":"x","eta":0.5}"#, "field `r`"),
            (r#"{"type":"erasure","r":3,"eta":0.5,"k":2}"#, "unknown field `k`"),
            (r#"{"type":"nope"}"#, "field `type`"),
            (r#"{"input_labels":["a"],"output_labels":["0"],"matrix":[["x"]]}"#, "field `matrix[0][0]`"),
            (r#"[1]"#, "top level"),
        ];
        for (text, needle) in cases {
            let msg = parse_channel_str(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{text}: {msg}");
        }
        let msg = parse_channel_str(r#"{"type":"erasure","r":3,"eta":1.5}"#).unwrap_err().to_string();
        assert!(msg.contains("eta"), "{msg}");
    }

    #[test]
    fn kraus_round_trip_and_rejection() {
        let e = make_quantum_erasure(2, 0.3).unwrap();
        let text = kraus_to_json(&e).to_string();
        match parse_channel_str(&text).unwrap() {
            ParsedChannel::Quantum(k) => assert_eq!(k, e),
            _ => panic!(),
        }
        let bad = r#"{"in_dim":1,"out_dim":1,"kraus":[{"re":[[0.9]],"im":[[0]]}]}"#;
        let msg = parse_channel_str(bad).unwrap_err().to_string();
        assert!(msg.contains("field `kraus`") && msg.contains("‖Σ K†K - I‖_F"), "{msg}");
        let shape = r#"{"in_dim":1,"out_dim":1,"kraus":[{"re":[[1]],"im":[[0],[0]]}]}"#;
        assert!(parse_channel_str(shape).unwrap_err().to_string().contains("kraus[0].im"));
    }

    #[test]
    fn explicit_round_trip() {
        let ch = ClassicalChannel::generalized_erasure(&[vec!["a", "b"], vec!["c"]], &[0.2, 0.7]).unwrap();
        assert_eq!(classical(&classical_to_json(&ch).to_string()), ch);
    }

    #[test]
    fn quantum_shorthands() {
        for text in [
            r#"{"type":"quantum_erasure","dim":3,"eta":0.4}"#,
            r#"{"type":"coarse_graining","dim":4,"blocks":[[0,1],[2,3]]}"#,
            r#"{"type":"partial_trace","dim_z":2,"dim_w":3}"#,
        ] {
            assert!(matches!(parse_channel_str(text).unwrap(), ParsedChannel::Quantum(_)), "{text}");
        }
        let msg = parse_channel_str(r#"{"type":"coarse_graining","dim":3,"blocks":[[0,1]]}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("field `blocks`"), "{msg}");
    }

    #[test]
    fn density_parse() {
        let rho = parse_density_str(r#"{"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]}"#).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!(parse_density_str(r#"{"re":[[0.5,0],[0,0.6]],"im":[[0,0],[0,0]]}"#).is_err());
    }
}
