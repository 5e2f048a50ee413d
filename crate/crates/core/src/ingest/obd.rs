//! CSV click-log ingestion: one Bernoulli reward pool per item.

use crate::env::RewardPool;
use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;
use std::io::Read;

#[derive(Debug, Clone)]
pub struct ClickLogConfig {
    /// Header name of the item/arm id column.
    pub item_column: String,
    /// Header name of the 0/1 click column.
    pub click_column: String,
}

impl Default for ClickLogConfig {
    fn default() -> Self {
        ClickLogConfig {
            item_column: "item_id".into(),
            click_column: "click".into(),
        }
    }
}

/// Parse a headered CSV click log into (item, click) pairs. Unknown columns
/// are ignored; missing configured columns or non-binary clicks are errors.
pub fn parse_click_log<R: Read>(reader: R, cfg: &ClickLogConfig) -> Result<Vec<(u64, u8)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(format!("click log headers: {e}")))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(format!("click log missing column '{name}'")))
    };
    let item_idx = find(&cfg.item_column)?;
    let click_idx = find(&cfg.click_column)?;
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(format!("click log row {}: {e}", line + 2)))?;
        let item: u64 = rec
            .get(item_idx)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(format!("click log row {}: bad item id", line + 2)))?;
        let click: u8 = match rec.get(click_idx).map(str::trim) {
            Some("0") => 0,
            Some("1") => 1,
            other => {
                return Err(Error::parse(format!(
                    "click log row {}: click must be 0 or 1, got {:?}",
                    line + 2,
                    other
                )))
            }
        };
        out.push((item, click));
    }
    Ok(out)
}

/// Group clicks into one Bernoulli pool per item, arms ordered by ascending
/// item id. Items with fewer than `min_samples` records are dropped.
pub fn click_pools(
    records: &[(u64, u8)],
    min_samples: usize,
) -> Result<(Vec<u64>, Vec<RewardPool>)> {
    let mut by_item: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &(item, click) in records {
        by_item.entry(item).or_default().push(click as f64);
    }
    let mut ids = Vec::new();
    let mut pools = Vec::new();
    for (item, samples) in by_item {
        if samples.len() < min_samples.max(1) {
            continue;
        }
        ids.push(item);
        pools.push(RewardPool::new(samples)?);
    }
    if pools.is_empty() {
        return Err(Error::config("click log produced no usable arms"));
    }
    Ok((ids, pools))
}
