//! JSON reports. Every map is a `serde_json::Map` (sorted keys) and every
//! list follows cell, node or time order, so equal inputs give equal bytes.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::sync::Arc;

use serde_json::{json, Value};

use sheafnet::activation::{region_of_influence_facet, ActivationSheaf, Activity};
use sheafnet::payload::{
    fixed_activation_subsheaf, simulate as run_simulation, CellKind, Packet, PayloadSheaf, PayloadValue, Protocol,
};
use sheafnet::sheaflin::vector_activation_sheaf;
use sheafnet::{Cell, CellId, NetworkDescription, NodeId, SimplicialComplex, TimeComplex, TimeWindow};

use crate::{CliError, ScheduleInput};

/// A link complex to report on: the static one, or one timeslice.
pub struct View {
    pub time: Option<i64>,
    pub complex: Arc<SimplicialComplex<NodeId>>,
}

/// The timeslices of the window if there is one, else the static complex.
pub fn views(net: &NetworkDescription) -> Vec<View> {
    match net.window() {
        Some(w) => w
            .times()
            .map(|t| View {
                time: Some(t),
                complex: Arc::new(net.link_complex(Some(t))),
            })
            .collect(),
        None => vec![View {
            time: None,
            complex: Arc::new(net.link_complex(None)),
        }],
    }
}

pub fn cell_name<V: Display>(cell: &Cell<V>) -> String {
    cell.to_string()
}

fn names<V: sheafnet::complex::Vertex + Display>(x: &SimplicialComplex<V>, ids: &BTreeSet<CellId>) -> Vec<String> {
    ids.iter().map(|&c| cell_name(x.cell(c))).collect()
}

fn header(net: &NetworkDescription) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("nodes".into(), json!(net.nodes()));
    m.insert("window".into(), window_json(net.window()));
    m
}

fn window_json(w: Option<TimeWindow>) -> Value {
    w.map_or(Value::Null, |w| json!([w.start(), w.end()]))
}

pub fn complex(net: &NetworkDescription) -> Value {
    let mut m = header(net);
    m.insert("threshold".into(), json!(net.threshold()));
    let slices: Vec<Value> = views(net)
        .iter()
        .map(|v| {
            let x = &v.complex;
            let facets = x.facets();
            let resources: Vec<Value> = facets
                .iter()
                .map(|f| json!({ "facet": cell_name(f), "members": f.vertices() }))
                .collect();
            json!({
                "time": v.time,
                "cells": x.cells().iter().map(cell_name).collect::<Vec<_>>(),
                "facets": facets.iter().map(cell_name).collect::<Vec<_>>(),
                "broadcast_resources": resources,
            })
        })
        .collect();
    m.insert("slices".into(), Value::Array(slices));
    if let Some(w) = net.window() {
        let tc = TimeComplex::time_dependent_link_complex(net, w);
        m.insert("temporal_edges".into(), json!(tc.temporal_edge_ids().count()));
        m.insert("total_cells".into(), json!(tc.complex().len()));
    }
    Value::Object(m)
}

pub fn sections(net: &NetworkDescription) -> Value {
    let mut m = header(net);
    let slices: Vec<Value> = views(net)
        .iter()
        .map(|v| {
            let x = &v.complex;
            let sheaf = ActivationSheaf::new(Arc::clone(x));
            let sections: Vec<Value> = sheaf
                .enumerate_global_sections()
                .iter()
                .map(|s| {
                    let transmitters = sheaf.transmitters(s);
                    let regions: Vec<Value> = transmitters
                        .iter()
                        .map(|&n| {
                            let active = sheaf.active_region(s, n).expect("transmitter of a section");
                            let roi = sheaf.region_of_influence(s, n).expect("transmitter of a section");
                            json!({
                                "node": n,
                                "active_region": names(x, &active),
                                "region_of_influence": names(x, &roi),
                            })
                        })
                        .collect();
                    json!({ "transmitters": transmitters, "regions": regions })
                })
                .collect();
            let facet_rois: Vec<Value> = x
                .facets()
                .iter()
                .map(|f| {
                    let roi = region_of_influence_facet(x, f).expect("facet of the complex");
                    json!({ "facet": cell_name(f), "region_of_influence": names(x, &roi) })
                })
                .collect();
            json!({
                "time": v.time,
                "count": sections.len(),
                "sections": sections,
                "facet_regions_of_influence": facet_rois,
            })
        })
        .collect();
    m.insert("slices".into(), Value::Array(slices));
    Value::Object(m)
}

/// Cohomology of the vector activation sheaf per view, with the check that
/// it is `[#nodes, 0, …]`. Returns whether every check passed.
pub fn cohomology(net: &NetworkDescription) -> (Value, bool) {
    let mut m = header(net);
    let mut all = true;
    let slices: Vec<Value> = views(net)
        .iter()
        .map(|v| {
            let k = v.complex.vertices().count();
            let dims = vector_activation_sheaf(Arc::clone(&v.complex)).cohomology_dims();
            let pass = dims.first().copied().unwrap_or(0) == k && dims.iter().skip(1).all(|&d| d == 0);
            all &= pass;
            json!({
                "time": v.time,
                "node_count": k,
                "dims": dims,
                "check": if pass { "PASS" } else { "FAIL" },
            })
        })
        .collect();
    m.insert("slices".into(), Value::Array(slices));
    m.insert("check".into(), json!(if all { "PASS" } else { "FAIL" }));
    (Value::Object(m), all)
}

/// Payload parameters for `simulate` and `bound`.
pub struct PayloadParams {
    pub protocol: Protocol,
    pub window: TimeWindow,
    pub packet_dim: usize,
    pub queue_len: usize,
}

fn payload_sheaf(net: &NetworkDescription, p: &PayloadParams) -> Result<PayloadSheaf, CliError> {
    let tc = Arc::new(TimeComplex::time_dependent_link_complex(net, p.window));
    Ok(PayloadSheaf::new(tc, p.packet_dim, p.queue_len, p.protocol.clone())?)
}

fn payload_header(
    net: &NetworkDescription,
    p: &PayloadParams,
    sched: &ScheduleInput,
) -> serde_json::Map<String, Value> {
    let mut m = header(net);
    m.insert("window".into(), window_json(Some(p.window)));
    m.insert("protocol".into(), json!(p.protocol.name()));
    m.insert("packet_dim".into(), json!(p.packet_dim));
    m.insert("queue_len".into(), json!(p.queue_len));
    let schedule: Vec<Value> = p
        .window
        .times()
        .map(|t| json!({ "time": t, "transmitters": sched.schedule.transmitters(t) }))
        .collect();
    m.insert("schedule".into(), Value::Array(schedule));
    m
}

fn packets(xs: &[Packet]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn value_json(v: &PayloadValue) -> Value {
    match v {
        PayloadValue::Vertex { prev, cur, buffer } => json!({
            "prev": prev.to_string(),
            "cur": cur.to_string(),
            "buffer": packets(buffer),
        }),
        PayloadValue::Temporal { state, queue } => json!({
            "state": state.to_string(),
            "queue": packets(queue),
        }),
        PayloadValue::Link { state, packet } => json!({
            "state": state.to_string(),
            "packet": packet.to_string(),
        }),
    }
}

pub fn simulate(net: &NetworkDescription, p: &PayloadParams, sched: &ScheduleInput) -> Result<Value, CliError> {
    let ps = payload_sheaf(net, p)?;
    let values = run_simulation(&ps, &sched.schedule, &sched.initial, &sched.injections)?;
    let x = ps.time_complex().complex();
    let mut trace = Vec::with_capacity(values.len());
    let mut transmissions = Vec::new();
    let mut receptions = Vec::new();
    for (c, v) in values.iter().enumerate() {
        let kind = match ps.kind(c) {
            CellKind::Vertex { .. } => "vertex",
            CellKind::Temporal { .. } => "temporal",
            CellKind::Link { .. } => "link",
        };
        trace.push(json!({ "cell": cell_name(x.cell(c)), "kind": kind, "value": value_json(v) }));
        if let (
            CellKind::Vertex { node, time },
            PayloadValue::Vertex {
                cur: Activity::Node(m),
                buffer,
                ..
            },
        ) = (ps.kind(c), v)
        {
            if *m == node && !buffer[buffer.len() - 1].is_zero() {
                transmissions
                    .push(json!({ "time": time, "node": node, "packet": buffer[buffer.len() - 1].to_string() }));
            } else if *m != node {
                receptions.push(json!({ "time": time, "node": node, "from": m, "packet": buffer[0].to_string() }));
            }
        }
    }
    let mut m = payload_header(net, p, sched);
    m.insert("trace".into(), Value::Array(trace));
    m.insert("transmissions".into(), Value::Array(transmissions));
    m.insert("receptions".into(), Value::Array(receptions));
    Ok(Value::Object(m))
}

pub fn bound(net: &NetworkDescription, p: &PayloadParams, sched: &ScheduleInput) -> Result<Value, CliError> {
    let ps = payload_sheaf(net, p)?;
    let fixed = fixed_activation_subsheaf(&ps, &sched.schedule)?;
    let mut m = payload_header(net, p, sched);
    m.insert("cochain_dims".into(), json!(fixed.sheaf().cochain_dims()));
    m.insert("bound".into(), json!(fixed.throughput_bound()));
    Ok(Value::Object(m))
}
