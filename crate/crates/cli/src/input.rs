//! Network and schedule files. Both are TOML; the grammar is in
//! `docs/FORMATS.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use toml::Spanned;

use sheafnet::activation::Activity;
use sheafnet::netmodel::{disk_signals, random_disk_network, Disk, NetError};
use sheafnet::payload::{InitialState, Injection, Packet, Priority, Schedule};
use sheafnet::{NetworkDescription, NodeId, Rational, TimeWindow};

/// A problem in an input file, located by line and field where possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub file: String,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ParseError {}

/// Source text with a name, for turning byte spans into diagnostics.
struct Source<'a> {
    name: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line_of(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn error(&self, span: Option<Range<usize>>, field: impl Into<String>, message: impl ToString) -> ParseError {
        ParseError {
            file: self.name.to_string(),
            line: span.map(|s| self.line_of(s.start)),
            field: Some(field.into()),
            message: message.to_string(),
        }
    }

    fn toml_error(&self, e: toml::de::Error) -> ParseError {
        let line = e.span().map(|s| self.line_of(s.start));
        // the key on the offending line, if it has one
        let field = line.and_then(|l| {
            let text = self.text.lines().nth(l - 1)?;
            let (key, _) = text.split_once('=')?;
            Some(key.trim().to_string())
        });
        ParseError {
            file: self.name.to_string(),
            line,
            field,
            message: e.message().trim().to_string(),
        }
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T, ParseError> {
        toml::from_str(self.text).map_err(|e| self.toml_error(e))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    threshold: Option<Spanned<f64>>,
    nodes: Option<Spanned<Vec<NodeId>>>,
    window: Option<Spanned<[i64; 2]>>,
    #[serde(default)]
    signal: Vec<Spanned<SignalEntry>>,
    #[serde(default)]
    disk: Vec<Spanned<DiskEntry>>,
    random_disk: Option<Spanned<RandomDiskEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalEntry {
    from: NodeId,
    to: NodeId,
    level: f64,
    time: Option<i64>,
    #[serde(default)]
    symmetric: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiskEntry {
    node: NodeId,
    x: f64,
    y: f64,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomDiskEntry {
    nodes: u32,
    #[serde(default = "default_side")]
    side: f64,
    radius: [f64; 2],
    seed: Option<u64>,
}

fn default_side() -> f64 {
    10.0
}

/// Parses a network file. `env_seed` seeds a `[random_disk]` section that
/// has no `seed` of its own.
pub fn parse_network(name: &str, text: &str, env_seed: Option<u64>) -> Result<NetworkDescription, ParseError> {
    let src = Source { name, text };
    let file: NetworkFile = src.parse()?;
    let window = match &file.window {
        Some(w) => {
            let [a, b] = *w.get_ref();
            Some(TimeWindow::new(a, b).map_err(|e| src.error(Some(w.span()), "window", e))?)
        }
        None => None,
    };
    let kinds = [
        file.nodes.is_some() || !file.signal.is_empty(),
        !file.disk.is_empty(),
        file.random_disk.is_some(),
    ];
    if kinds.iter().filter(|&&k| k).count() > 1 {
        return Err(src.error(
            None,
            "nodes",
            "use exactly one of `nodes`/`signal`, `disk` or `random_disk`",
        ));
    }

    if let Some(rd) = &file.random_disk {
        if let Some(t) = &file.threshold {
            return Err(src.error(Some(t.span()), "threshold", "the disk model fixes the threshold"));
        }
        let span = Some(rd.span());
        let rd = rd.get_ref();
        let [lo, hi] = rd.radius;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
            return Err(src.error(span, "random_disk.radius", "need 0 < min <= max"));
        }
        if !(rd.side.is_finite() && rd.side > 0.0) {
            return Err(src.error(span, "random_disk.side", "must be positive"));
        }
        let seed = rd.seed.or(env_seed).unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net =
            random_disk_network(&mut rng, rd.nodes, rd.side, lo..=hi).map_err(|e| src.error(span, "random_disk", e))?;
        return Ok(match window {
            Some(w) => net.with_window(w),
            None => net,
        });
    }

    if !file.disk.is_empty() {
        if let Some(t) = &file.threshold {
            return Err(src.error(Some(t.span()), "threshold", "the disk model fixes the threshold"));
        }
        let mut disks = BTreeMap::new();
        for (i, entry) in file.disk.iter().enumerate() {
            let d = entry.get_ref();
            let disk = Disk {
                x: d.x,
                y: d.y,
                radius: d.radius,
            };
            if disks.insert(d.node, disk).is_some() {
                return Err(src.error(
                    Some(entry.span()),
                    format!("disk[{i}].node"),
                    NetError::DuplicateNode(d.node),
                ));
            }
        }
        return disk_signals(&disks, window).map_err(|e| src.error(None, "disk", e));
    }

    let threshold = file
        .threshold
        .as_ref()
        .ok_or_else(|| src.error(None, "threshold", "missing"))?;
    let nodes = file.nodes.as_ref().map(|n| n.get_ref().clone()).unwrap_or_default();
    let mut net = NetworkDescription::new(nodes, *threshold.get_ref()).map_err(|e| {
        let (span, field) = match e {
            NetError::NonFiniteThreshold(_) => (threshold.span(), "threshold"),
            _ => (file.nodes.as_ref().expect("nodes were given").span(), "nodes"),
        };
        src.error(Some(span), field, e)
    })?;
    for (i, entry) in file.signal.iter().enumerate() {
        let s = entry.get_ref();
        let mut pairs = vec![(s.from, s.to)];
        if s.symmetric {
            pairs.push((s.to, s.from));
        }
        for (a, b) in pairs {
            let set = match s.time {
                Some(t) => net.set_timed_signal(a, b, t, s.level),
                None => net.set_signal(a, b, s.level),
            };
            set.map_err(|e| src.error(Some(entry.span()), format!("signal[{i}]"), e))?;
        }
    }
    Ok(match window {
        Some(w) => net.with_window(w),
        None => net,
    })
}

/// A parsed schedule file.
#[derive(Clone, Debug, Default)]
pub struct ScheduleInput {
    pub schedule: Schedule,
    pub injections: Vec<Injection>,
    pub initial: BTreeMap<NodeId, InitialState>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    #[serde(default)]
    slice: Vec<Spanned<SliceEntry>>,
    #[serde(default)]
    injection: Vec<Spanned<InjectionEntry>>,
    #[serde(default)]
    initial: Vec<Spanned<InitialEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceEntry {
    time: i64,
    transmitters: Vec<NodeId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InjectionEntry {
    node: NodeId,
    time: i64,
    slot: usize,
    payload: Vec<Number>,
    destination: Option<NodeId>,
    priority: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialEntry {
    node: NodeId,
    prev: Option<NodeId>,
    buffer: Option<Vec<Vec<Number>>>,
}

/// An integer or a `"p/q"` string.
#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn rational(&self) -> Result<Rational, String> {
        match self {
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
            Number::Text(s) => Rational::from_str(s.trim()).map_err(|_| format!("`{s}` is not a rational number")),
        }
    }
}

fn rationals(xs: &[Number]) -> Result<Vec<Rational>, String> {
    xs.iter().map(Number::rational).collect()
}

pub fn parse_schedule(name: &str, text: &str) -> Result<ScheduleInput, ParseError> {
    let src = Source { name, text };
    let file: ScheduleFile = src.parse()?;
    let mut out = ScheduleInput::default();

    let mut seen = BTreeSet::new();
    for (i, entry) in file.slice.iter().enumerate() {
        let s = entry.get_ref();
        if !seen.insert(s.time) {
            return Err(src.error(
                Some(entry.span()),
                format!("slice[{i}].time"),
                format!("time {} listed twice", s.time),
            ));
        }
        out.schedule.set(s.time, s.transmitters.iter().copied());
    }

    for (i, entry) in file.injection.iter().enumerate() {
        let inj = entry.get_ref();
        let span = Some(entry.span());
        let payload =
            rationals(&inj.payload).map_err(|e| src.error(span.clone(), format!("injection[{i}].payload"), e))?;
        let mut packet = Packet::new(payload);
        if let Some(d) = inj.destination {
            packet = packet.with_destination(d);
        }
        match inj.priority.as_deref() {
            None | Some("low") => {}
            Some("high") => packet = packet.with_priority(Priority::High),
            Some(other) => {
                return Err(src.error(
                    span,
                    format!("injection[{i}].priority"),
                    format!("expected `low` or `high`, got `{other}`"),
                ))
            }
        }
        out.injections.push(Injection {
            node: inj.node,
            time: inj.time,
            slot: inj.slot,
            packet,
        });
    }

    for (i, entry) in file.initial.iter().enumerate() {
        let init = entry.get_ref();
        let span = Some(entry.span());
        let buffer = match &init.buffer {
            Some(slots) => slots
                .iter()
                .map(|p| rationals(p).map(Packet::new))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| src.error(span.clone(), format!("initial[{i}].buffer"), e))?,
            None => Vec::new(),
        };
        let state = InitialState {
            prev: Activity::from(init.prev),
            buffer,
        };
        if out.initial.insert(init.node, state).is_some() {
            return Err(src.error(
                span,
                format!("initial[{i}].node"),
                format!("node {} listed twice", init.node),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_network_parses() {
        let text = "threshold = 0.5\nnodes = [1, 2, 3]\n\n[[signal]]\nfrom = 1\nto = 2\nlevel = 1.0\nsymmetric = true\n\n[[signal]]\nfrom = 2\nto = 3\nlevel = 1.0\nsymmetric = true\n";
        let net = parse_network("path.toml", text, None).unwrap();
        assert_eq!(net.link_complex(None).len(), 5);
    }

    #[test]
    fn malformed_threshold_names_line_and_field() {
        let err = parse_network("bad.toml", "nodes = [1]\nthreshold = \"high\"\n", None).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.field.as_deref(), Some("threshold"));
    }

    #[test]
    fn unknown_signal_node_is_located() {
        let text = "threshold = 0.5\nnodes = [1]\n[[signal]]\nfrom = 1\nto = 9\nlevel = 1.0\n";
        let err = parse_network("x.toml", text, None).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("signal[0]"));
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains('9'));
    }

    #[test]
    fn random_disk_seed_falls_back_to_env_value() {
        let text = "[random_disk]\nnodes = 5\nradius = [1.0, 5.0]\n";
        let a = parse_network("r.toml", text, Some(3)).unwrap();
        let b = parse_network("r.toml", text, Some(3)).unwrap();
        let c = parse_network("r.toml", &format!("{text}seed = 3\n"), None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn schedule_with_rational_payloads() {
        let text = "[[slice]]\ntime = 0\ntransmitters = [1]\n\n[[injection]]\nnode = 1\ntime = 0\nslot = 3\npayload = [\"1/2\"]\ndestination = 2\npriority = \"high\"\n";
        let s = parse_schedule("s.toml", text).unwrap();
        assert_eq!(s.schedule.transmitters(0), BTreeSet::from([1]));
        let p = &s.injections[0].packet;
        assert_eq!(p.payload, vec![Rational::new(1.into(), 2.into())]);
        assert_eq!(p.priority, Priority::High);
    }

    #[test]
    fn duplicate_slice_is_rejected() {
        let text = "[[slice]]\ntime = 0\ntransmitters = []\n[[slice]]\ntime = 0\ntransmitters = [1]\n";
        let err = parse_schedule("s.toml", text).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("slice[1].time"));
    }
}
