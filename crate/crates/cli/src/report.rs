use serde::Serialize;
use serde_json::Value;

use catmig::{Bounds, Instance};

#[derive(Debug, Serialize)]
pub struct BoundsUsed {
    pub saturation: usize,
    pub path: usize,
    pub rewrite_steps: usize,
    pub rewrite_max_len: usize,
    pub rewrite_max_states: usize,
}

impl From<&Bounds> for BoundsUsed {
    fn from(b: &Bounds) -> Self {
        BoundsUsed {
            saturation: b.saturation,
            path: b.path,
            rewrite_steps: b.rewrite.steps,
            rewrite_max_len: b.rewrite.max_len,
            rewrite_max_states: b.rewrite.max_states,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TableCount {
    pub table: String,
    pub rows: usize,
}

pub fn table_counts(i: &Instance) -> Vec<TableCount> {
    let g = i.schema().graph();
    g.vertices()
        .map(|v| TableCount {
            table: g.vertex_name(v).to_string(),
            rows: i.row_count(v),
        })
        .collect()
}

/// Machine-readable summary of one invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<String>,
    pub bounds: BoundsUsed,
    pub warnings: Vec<String>,
    pub tables: Vec<TableCount>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, inputs: &[String], bounds: &Bounds) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: inputs.to_vec(),
            bounds: bounds.into(),
            warnings: Vec::new(),
            tables: Vec::new(),
            result: Value::Null,
            output: None,
            wall_time_ms: None,
        }
    }
}
