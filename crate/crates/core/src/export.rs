//! Flat records for CSV and JSON output.
//!
//! Numbers are written as decimal strings at full working precision (exact
//! values as `p/q`), so that reading a record back at the same precision gives
//! the value that was written.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cantor::{DepthDimension, ScanReport};
use crate::error::{Error, Result};
use crate::fricke::{FrickeParams, FrickeTriple, MovePath};
use crate::identity::{node_interval, summand, ExcisionInterval};
use crate::scalar::Scalar;
use crate::tree::TreeNode;

/// One enumerated node. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub path: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub depth: usize,
    pub width: String,
    pub summand: String,
    pub lo: String,
    pub hi: String,
}

impl NodeRecord {
    pub fn new<S: Scalar>(n: &TreeNode<S>, params: &FrickeParams<S>, prec: u32) -> Result<Self> {
        let iv = node_interval(n, params);
        Ok(NodeRecord {
            path: n.path.to_string(),
            x: n.triple.x.to_decimal(),
            y: n.triple.y.to_decimal(),
            z: n.triple.z.to_decimal(),
            depth: n.depth,
            width: iv.width(prec).to_decimal(),
            summand: summand(n.z(), params, prec)?.to_decimal(),
            lo: iv.lo(prec).to_decimal(),
            hi: iv.hi(prec).to_decimal(),
        })
    }

    pub fn move_path(&self) -> Result<MovePath> {
        self.path.parse()
    }

    /// The triple, read in the scalar type of `like`.
    pub fn triple<S: Scalar>(&self, like: &S) -> Result<FrickeTriple<S>> {
        Ok(FrickeTriple::new(like.parse_like(&self.x)?, like.parse_like(&self.y)?, like.parse_like(&self.z)?))
    }
}

/// One excision interval, specials included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub source: String,
    pub z: String,
    pub lo: String,
    pub hi: String,
    pub width: String,
    pub summand: String,
}

impl IntervalRecord {
    pub fn new<S: Scalar>(iv: &ExcisionInterval<S>, params: &FrickeParams<S>, prec: u32) -> Result<Self> {
        Ok(IntervalRecord {
            source: iv.source.to_string(),
            z: iv.z.to_decimal(),
            lo: iv.lo(prec).to_decimal(),
            hi: iv.hi(prec).to_decimal(),
            width: iv.width(prec).to_decimal(),
            summand: summand(&iv.z, params, prec)?.to_decimal(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionRecord {
    pub depth: usize,
    pub gap_count: usize,
    pub gap_total: String,
    pub box_scale: String,
    pub box_count: String,
    pub slope: String,
}

impl From<&DepthDimension> for DimensionRecord {
    fn from(d: &DepthDimension) -> Self {
        DimensionRecord {
            depth: d.depth,
            gap_count: d.gap_count,
            gap_total: d.gap_total.to_decimal(),
            box_scale: d.box_scale.to_decimal(),
            box_count: d.box_count.to_string(),
            slope: d.estimate.to_decimal(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub step: usize,
    pub ratio: String,
    pub log2_z: f64,
}

pub fn scan_records(r: &ScanReport) -> Vec<ScanRecord> {
    r.steps.iter().map(|s| ScanRecord { step: s.step, ratio: s.ratio.to_decimal(), log2_z: s.log2_z }).collect()
}

pub fn node_records<'a, S: Scalar + 'a>(
    nodes: impl IntoIterator<Item = &'a TreeNode<S>>,
    params: &FrickeParams<S>,
    prec: u32,
) -> Result<Vec<NodeRecord>> {
    nodes.into_iter().map(|n| NodeRecord::new(n, params, prec)).collect()
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// CSV with a header row, columns in field order.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(csv_err)?;
    String::from_utf8(bytes).map_err(csv_err)
}

pub fn from_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// Pretty JSON; keys appear in declaration order.
pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| Error::Parse(format!("json: {e}")))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))
}
