//! lnd `describegraph` ingestion and canonical serialization.
//!
//! lnd renders most integers as JSON strings; both strings and numbers are
//! accepted. Output uses the same layout with nodes sorted by public key and
//! channels sorted by id, so a serialized graph parses back to an equal value.

use serde_json::{json, Map, Value};

use super::{short_channel_id_block, Channel, ChannelGraph, ChannelPolicy, NodeId};
use crate::error::GraphError;

fn err(path: impl Into<String>, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn as_u64(v: &Value, path: &str) -> Result<u64, GraphError> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .ok_or_else(|| err(path, format!("expected unsigned integer, got {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| err(path, format!("expected unsigned integer, got {s:?}"))),
        other => Err(err(path, format!("expected unsigned integer, got {other}"))),
    }
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, GraphError> {
    v.as_str()
        .ok_or_else(|| err(path, format!("expected string, got {v}")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, GraphError> {
    obj.get(key)
        .ok_or_else(|| err(format!("{path}.{key}"), "missing field"))
}

fn channel_sort_key(id: &str) -> (Option<u64>, &str) {
    (id.parse().ok(), id)
}

fn parse_policy(v: Option<&Value>, path: &str) -> Result<ChannelPolicy, GraphError> {
    let obj = match v {
        None | Some(Value::Null) => return Ok(ChannelPolicy::disabled()),
        Some(Value::Object(o)) => o,
        Some(other) => return Err(err(path, format!("expected object or null, got {other}"))),
    };
    let base_fee = as_u64(
        field(obj, "fee_base_msat", path)?,
        &format!("{path}.fee_base_msat"),
    )?;
    let prop_fee = as_u64(
        field(obj, "fee_rate_milli_msat", path)?,
        &format!("{path}.fee_rate_milli_msat"),
    )?;
    let delay_path = format!("{path}.time_lock_delta");
    let delay = as_u64(field(obj, "time_lock_delta", path)?, &delay_path)?;
    let delay = u32::try_from(delay).map_err(|_| err(delay_path, "delay out of range"))?;
    let disabled = match obj.get("disabled") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(other) => {
            return Err(err(
                format!("{path}.disabled"),
                format!("expected boolean, got {other}"),
            ))
        }
    };
    Ok(ChannelPolicy {
        base_fee,
        prop_fee,
        delay,
        enabled: !disabled,
    })
}

/// Parses an lnd `describegraph` JSON document.
///
/// Capacities are converted from satoshi to millisatoshi. A missing or null
/// directional policy disables that direction. Channel height is the block
/// encoded in a numeric short channel id, else 0.
pub fn parse_snapshot(bytes: &[u8]) -> Result<ChannelGraph, GraphError> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| err("$", e.to_string()))?;
    let root = doc
        .as_object()
        .ok_or_else(|| err("$", "expected a JSON object"))?;
    let nodes = field(root, "nodes", "$")?
        .as_array()
        .ok_or_else(|| err("$.nodes", "expected array"))?;
    let edges = field(root, "edges", "$")?
        .as_array()
        .ok_or_else(|| err("$.edges", "expected array"))?;

    let mut ids = Vec::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        let path = format!("$.nodes[{i}]");
        let obj = n.as_object().ok_or_else(|| err(&path, "expected object"))?;
        let pk = as_str(field(obj, "pub_key", &path)?, &format!("{path}.pub_key"))?;
        ids.push(pk.to_owned());
    }
    ids.sort();
    ids.dedup();

    let mut graph = ChannelGraph::new();
    for id in ids {
        graph.add_node(NodeId::new(id));
    }

    let mut channels = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let path = format!("$.edges[{i}]");
        let obj = e.as_object().ok_or_else(|| err(&path, "expected object"))?;
        let id_val = field(obj, "channel_id", &path)?;
        let id = match id_val {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => {
                return Err(err(
                    format!("{path}.channel_id"),
                    format!("expected string, got {other}"),
                ))
            }
        };
        let endpoint = |key: &str| -> Result<usize, GraphError> {
            let pk = as_str(field(obj, key, &path)?, &format!("{path}.{key}"))?;
            graph.node_index(&NodeId::new(pk)).ok_or_else(|| {
                GraphError::UnknownNode(format!("{pk} (referenced at {path}.{key})"))
            })
        };
        let node_a = endpoint("node1_pub")?;
        let node_b = endpoint("node2_pub")?;
        let capacity = match obj.get("capacity_msat") {
            Some(v) if !v.is_null() => as_u64(v, &format!("{path}.capacity_msat"))?,
            _ => {
                let sat = as_u64(field(obj, "capacity", &path)?, &format!("{path}.capacity"))?;
                sat.checked_mul(1000)
                    .ok_or_else(|| err(format!("{path}.capacity"), "capacity overflows"))?
            }
        };
        let policy_a_to_b = parse_policy(obj.get("node1_policy"), &format!("{path}.node1_policy"))?;
        let policy_b_to_a = parse_policy(obj.get("node2_policy"), &format!("{path}.node2_policy"))?;
        let height = short_channel_id_block(&id).unwrap_or(0);
        channels.push(Channel {
            id,
            node_a,
            node_b,
            capacity,
            height,
            policy_a_to_b,
            policy_b_to_a,
        });
    }
    channels.sort_by(|a, b| channel_sort_key(&a.id).cmp(&channel_sort_key(&b.id)));
    for ch in channels {
        graph.add_channel(ch)?;
    }
    Ok(graph)
}

fn policy_json(p: &ChannelPolicy) -> Value {
    json!({
        "fee_base_msat": p.base_fee.to_string(),
        "fee_rate_milli_msat": p.prop_fee.to_string(),
        "time_lock_delta": p.delay,
        "disabled": !p.enabled,
    })
}

/// Canonical `describegraph`-compatible JSON with sorted ids.
pub fn serialize_snapshot(graph: &ChannelGraph) -> String {
    let mut node_ids: Vec<&NodeId> = graph.nodes().iter().collect();
    node_ids.sort();
    let nodes: Vec<Value> = node_ids
        .iter()
        .map(|id| json!({ "pub_key": id.as_str() }))
        .collect();

    let mut chans: Vec<&Channel> = graph.channels().iter().collect();
    chans.sort_by(|a, b| channel_sort_key(&a.id).cmp(&channel_sort_key(&b.id)));
    let edges: Vec<Value> = chans
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("channel_id".into(), Value::String(c.id.clone()));
            obj.insert(
                "node1_pub".into(),
                Value::String(graph.node_id(c.node_a).to_string()),
            );
            obj.insert(
                "node2_pub".into(),
                Value::String(graph.node_id(c.node_b).to_string()),
            );
            obj.insert(
                "capacity".into(),
                Value::String((c.capacity / 1000).to_string()),
            );
            if c.capacity % 1000 != 0 {
                obj.insert(
                    "capacity_msat".into(),
                    Value::String(c.capacity.to_string()),
                );
            }
            obj.insert("node1_policy".into(), policy_json(&c.policy_a_to_b));
            obj.insert("node2_policy".into(), policy_json(&c.policy_b_to_a));
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "nodes": nodes, "edges": edges });
    serde_json::to_string_pretty(&doc).expect("serializing a JSON value cannot fail")
}
