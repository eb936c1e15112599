use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{stratify, RawModel, StratifiedModel};
use crate::error::{Error, Result};
use crate::formula::VarContext;

/// Wire form of a model. `sheets` and `sheet_order` are emitted on export and ignored on import.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub worlds: Vec<i64>,
    #[serde(default)]
    pub r0: Vec<[i64; 2]>,
    #[serde(default)]
    pub r1: Vec<[i64; 2]>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheets: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheet_order: Option<Vec<[i64; 2]>>,
}

impl ModelJson {
    /// Variable names mentioned by the valuation.
    pub fn variables(&self) -> Vec<String> {
        let mut names: Vec<String> = self.val.values().flatten().cloned().collect();
        names.sort();
        names.dedup();
        names
    }

    /// Converts to a raw model over `ctx`.
    pub fn to_raw(&self, ctx: &VarContext) -> Result<RawModel> {
        let mut val = vec![0u64; self.worlds.len()];
        for (w, names) in &self.val {
            let id: i64 = w
                .trim()
                .parse()
                .map_err(|_| Error::InvalidModel(format!("valuation key `{w}` is not a world id")))?;
            let pos = self.worlds.iter().position(|&x| x == id).ok_or(Error::UnknownWorld(id))?;
            for n in names {
                let i = ctx.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone()))?;
                val[pos] |= 1 << i;
            }
        }
        let raw = RawModel {
            worlds: self.worlds.clone(),
            r0: self.r0.iter().map(|e| (e[0], e[1])).collect(),
            r1: self.r1.iter().map(|e| (e[0], e[1])).collect(),
            val,
            root: self.root,
        };
        raw.index_map()?;
        Ok(raw)
    }
}

/// Parses the wire form into a raw model; with no context, the variables of the file are used.
pub fn raw_from_json(text: &str, ctx: Option<&VarContext>) -> Result<(RawModel, VarContext)> {
    let j: ModelJson = serde_json::from_str(text)?;
    let ctx = match ctx {
        Some(c) => c.clone(),
        None => VarContext::canonical(j.variables())?,
    };
    Ok((j.to_raw(&ctx)?, ctx))
}

/// Parses, closes both relations, validates, and stratifies.
pub fn model_from_json(text: &str, ctx: &VarContext) -> Result<StratifiedModel> {
    let (raw, _) = raw_from_json(text, Some(ctx))?;
    stratify(&raw.closed()?)
}

/// Export with closed relations and the sheet decomposition.
pub fn model_to_json(m: &StratifiedModel, ctx: &VarContext) -> ModelJson {
    let raw = m.to_raw();
    let mut val = BTreeMap::new();
    for (x, &v) in m.valuations().iter().enumerate() {
        let names: Vec<String> = (0..ctx.len())
            .filter(|&i| (v >> i) & 1 == 1)
            .map(|i| ctx.name(i).to_string())
            .collect();
        val.insert(m.id(x).to_string(), names);
    }
    ModelJson {
        worlds: raw.worlds,
        r0: raw.r0.iter().map(|&(a, b)| [a, b]).collect(),
        r1: raw.r1.iter().map(|&(a, b)| [a, b]).collect(),
        val,
        root: raw.root,
        sheets: Some(
            (0..m.sheet_count())
                .map(|s| m.sheet_worlds(s).iter().map(|&x| m.id(x)).collect())
                .collect(),
        ),
        sheet_order: Some(m.sheet_order().into_iter().map(|(a, b)| [a as i64, b as i64]).collect()),
    }
}
