//! JSON file formats for instances and assignments.
//!
//! Instance layout:
//!
//! ```json
//! {
//!   "items": [{"id": "i0", "weight": 3.0}],
//!   "bins": [{"id": "b0", "capacity": 10.0}],
//!   "objective": {"type": "modular", "values": {"i0": 4.0}}
//! }
//! ```
//!
//! `objective` is one of `modular` (`values`), `weighted_coverage` (`universe`, `covers`) or
//! `group_saturation` (`caps`, `contrib`). Unknown keys are rejected. Items missing from the
//! objective maps contribute nothing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::instance::{Assignment, Bin, Item, SmkpInstance};
use crate::oracle::{ObjectiveKind, ObjectiveOracle};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    id: String,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BinRecord {
    id: String,
    capacity: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ObjectiveRecord {
    Modular {
        values: BTreeMap<String, f64>,
    },
    WeightedCoverage {
        universe: BTreeMap<String, f64>,
        covers: BTreeMap<String, Vec<String>>,
    },
    GroupSaturation {
        caps: BTreeMap<String, f64>,
        contrib: BTreeMap<String, BTreeMap<String, f64>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    items: Vec<ItemRecord>,
    bins: Vec<BinRecord>,
    objective: ObjectiveRecord,
}

fn index_of(names: &[&str], name: &str, what: &str) -> Result<usize> {
    match names.binary_search(&name) {
        Ok(k) => Ok(k),
        Err(_) => input_err(format!("unknown {what} {name:?}")),
    }
}

/// Parse an instance document.
pub fn parse_instance(text: &str) -> Result<SmkpInstance> {
    let rec: InstanceRecord = serde_json::from_str(text)?;
    let items: Vec<Item> =
        rec.items.into_iter().map(|r| Item { id: r.id, weight: r.weight }).collect();
    let bins: Vec<Bin> =
        rec.bins.into_iter().map(|r| Bin { id: r.id, capacity: r.capacity }).collect();
    let mut ids: Vec<(&str, usize)> = items.iter().enumerate().map(|(k, i)| (i.id.as_str(), k)).collect();
    ids.sort();
    let lookup = |id: &str| -> Result<usize> {
        match ids.binary_search_by(|(name, _)| (*name).cmp(id)) {
            Ok(pos) => Ok(ids[pos].1),
            Err(_) => input_err(format!("objective references unknown item {id:?}")),
        }
    };
    let n = items.len();
    let kind = match rec.objective {
        ObjectiveRecord::Modular { values } => {
            let mut v = vec![0.0; n];
            for (id, val) in values {
                v[lookup(&id)?] = val;
            }
            ObjectiveKind::Modular { values: v }
        }
        ObjectiveRecord::WeightedCoverage { universe, covers } => {
            let names: Vec<&str> = universe.keys().map(String::as_str).collect();
            let mut c = vec![Vec::new(); n];
            for (id, elems) in &covers {
                let row = &mut c[lookup(id)?];
                for e in elems {
                    row.push(index_of(&names, e, "universe element")?);
                }
                row.sort_unstable();
                row.dedup();
            }
            let universe = universe.iter().map(|(k, &w)| (k.clone(), w)).collect();
            ObjectiveKind::WeightedCoverage { universe, covers: c }
        }
        ObjectiveRecord::GroupSaturation { caps, contrib } => {
            let names: Vec<&str> = caps.keys().map(String::as_str).collect();
            let mut c = vec![Vec::new(); n];
            for (id, row) in &contrib {
                let slot = &mut c[lookup(id)?];
                for (g, &val) in row {
                    slot.push((index_of(&names, g, "group")?, val));
                }
            }
            let groups = caps.iter().map(|(k, &v)| (k.clone(), v)).collect();
            ObjectiveKind::GroupSaturation { groups, contrib: c }
        }
    };
    SmkpInstance::new(items, bins, ObjectiveOracle::new(kind)?)
}

fn objective_record(items: &[Item], kind: &ObjectiveKind) -> ObjectiveRecord {
    let id = |k: usize| items[k].id.clone();
    match kind {
        ObjectiveKind::Modular { values } => ObjectiveRecord::Modular {
            values: values.iter().enumerate().map(|(k, &v)| (id(k), v)).collect(),
        },
        ObjectiveKind::WeightedCoverage { universe, covers } => ObjectiveRecord::WeightedCoverage {
            universe: universe.iter().cloned().collect(),
            covers: covers
                .iter()
                .enumerate()
                .map(|(k, row)| (id(k), row.iter().map(|&u| universe[u].0.clone()).collect()))
                .collect(),
        },
        ObjectiveKind::GroupSaturation { groups, contrib } => ObjectiveRecord::GroupSaturation {
            caps: groups.iter().cloned().collect(),
            contrib: contrib
                .iter()
                .enumerate()
                .map(|(k, row)| (id(k), row.iter().map(|&(g, v)| (groups[g].0.clone(), v)).collect()))
                .collect(),
        },
    }
}

/// Serialize an instance as pretty-printed JSON.
///
/// Universe elements and groups are written in name order, so an in-memory objective whose
/// element lists are not name-sorted comes back re-indexed (but evaluates identically).
pub fn instance_to_json(instance: &SmkpInstance) -> String {
    let rec = InstanceRecord {
        items: instance
            .items
            .iter()
            .map(|i| ItemRecord { id: i.id.clone(), weight: i.weight })
            .collect(),
        bins: instance
            .bins
            .iter()
            .map(|b| BinRecord { id: b.id.clone(), capacity: b.capacity })
            .collect(),
        objective: objective_record(&instance.items, instance.objective.kind()),
    };
    serde_json::to_string_pretty(&rec).expect("instance records always serialize")
}

/// `{bin id: [item ids]}` for the non-empty bins.
pub fn assignment_ids<F>(instance: &SmkpInstance<F>, assignment: &Assignment) -> BTreeMap<String, Vec<String>> {
    assignment
        .iter()
        .map(|(b, items)| {
            (
                instance.bins[b].id.clone(),
                items.iter().map(|&i| instance.items[i].id.clone()).collect(),
            )
        })
        .collect()
}

/// Inverse of [`assignment_ids`].
pub fn assignment_from_ids<F>(
    instance: &SmkpInstance<F>,
    ids: &BTreeMap<String, Vec<String>>,
) -> Result<Assignment> {
    let mut out = Assignment::new();
    for (bin_id, items) in ids {
        let Some(b) = instance.bins.iter().position(|b| &b.id == bin_id) else {
            return input_err(format!("unknown bin id {bin_id:?}"));
        };
        for item_id in items {
            let Some(i) = instance.items.iter().position(|i| &i.id == item_id) else {
                return input_err(format!("unknown item id {item_id:?}"));
            };
            out.insert(b, i);
        }
    }
    Ok(out)
}

/// Parse an assignment written as `{bin id: [item ids]}`, or a solver result document that
/// carries one under an `assignment` key.
pub fn parse_assignment<F>(instance: &SmkpInstance<F>, text: &str) -> Result<Assignment> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let body = match value.get("assignment") {
        Some(inner) if value.get("value").is_some() => inner.clone(),
        _ => value,
    };
    let ids: BTreeMap<String, Vec<String>> = serde_json::from_value(body)?;
    assignment_from_ids(instance, &ids)
}
