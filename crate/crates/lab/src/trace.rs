//! Trace files: UTF-8, one record per line, tab-separated fields, the first
//! field naming the record kind.
//!
//! | tag | fields after the tag |
//! |-----|----------------------|
//! | `H` | format version, config digest, seed, n, control, reference direction, roster, initial values |
//! | `E` | round, kind, actor, index a, index b, value a, value b, algotype a, algotype b |
//! | `S` | round, event index, trigger, sortedness, monotonicity error, aggregation |
//! | `F` | swaps, comparisons, denied, rounds, activations, terminated by, final cell ids |
//!
//! * control: `cell-view` or `traditional/<algorithm>/<direction>`
//! * roster: comma-separated `<algotype>/<direction>/<frozen>/<group>`, one per cell id
//! * event kind: `compare`, `swap`, `denied/initiator-frozen`, `denied/immovable`
//! * actor: a cell id or `controller`
//! * trigger: `initial`, `swap`, `round-end`
//! * aggregation: a number, or `-` when undefined
//!
//! Numbers are written in Rust's shortest round-trip form, so loading a
//! saved trace gives back exactly the records that were written.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use cellsort_core::probe::{
    Actor, Event, EventKind, Footer, Header, OrderError, Probe, RecordOrder, RosterEntry, Snapshot, SnapshotTrigger,
    TraceRecord, FORMAT_VERSION,
};
use cellsort_core::{Algorithm, Control, Direction, FrozenKind, TerminatedBy};
use cellsort_core::model::DenyReason;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported trace format {found:?}; this build reads {FORMAT_VERSION:?}")]
    UnsupportedVersion { line: usize, found: String },
    #[error("line {line}: {source}")]
    Order {
        line: usize,
        #[source]
        source: OrderError,
    },
    #[error("trace ends without a footer record")]
    MissingFooter,
}

fn trigger_name(t: SnapshotTrigger) -> &'static str {
    match t {
        SnapshotTrigger::Initial => "initial",
        SnapshotTrigger::Swap => "swap",
        SnapshotTrigger::RoundEnd => "round-end",
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

/// Render one record as a line, without the newline.
pub fn format_record(record: &TraceRecord) -> String {
    match record {
        TraceRecord::Header(h) => {
            let control = match h.control {
                Control::CellView => "cell-view".to_owned(),
                Control::Traditional { algorithm, direction } => format!("traditional/{algorithm}/{direction}"),
            };
            let roster = join(&h.roster, |r| format!("{}/{}/{}/{}", r.algotype, r.direction, r.frozen, r.group));
            let values = join(&h.initial_values, |v| v.to_string());
            format!(
                "H\t{}\t{}\t{}\t{}\t{control}\t{}\t{roster}\t{values}",
                h.format_version, h.config_digest, h.seed, h.n, h.reference_direction
            )
        }
        TraceRecord::Event(e) => {
            let kind = match e.kind {
                EventKind::Compare => "compare".to_owned(),
                EventKind::Swap => "swap".to_owned(),
                EventKind::SwapDenied(r) => format!("denied/{}", r.name()),
            };
            let actor = match e.actor {
                Actor::Cell(id) => id.to_string(),
                Actor::Controller => "controller".to_owned(),
            };
            format!(
                "E\t{}\t{kind}\t{actor}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.round, e.index_a, e.index_b, e.value_a, e.value_b, e.algotype_a, e.algotype_b
            )
        }
        TraceRecord::Snapshot(s) => {
            let agg = s.aggregation_value.map_or_else(|| "-".to_owned(), |a| a.to_string());
            format!(
                "S\t{}\t{}\t{}\t{}\t{}\t{agg}",
                s.round,
                s.event_index,
                trigger_name(s.trigger),
                s.sortedness,
                s.monotonicity_error
            )
        }
        TraceRecord::Footer(f) => format!(
            "F\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            f.swaps,
            f.comparisons,
            f.denied,
            f.rounds,
            f.activations,
            f.terminated_by,
            join(&f.final_ids, |id| id.to_string())
        ),
    }
}

/// A probe that streams records to a writer, refusing out-of-order records.
pub struct TraceWriter<W: Write> {
    out: W,
    order: RecordOrder,
    line: usize,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        Self {
            out,
            order: RecordOrder::default(),
            line: 0,
        }
    }

    /// Flush and hand back the writer.
    pub fn finish(mut self) -> Result<W, TraceError> {
        self.out.flush()?;
        Ok(self.out)
    }
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> io::Result<Self> {
        Ok(Self::new(BufWriter::new(File::create(path)?)))
    }
}

impl<W: Write> Probe for TraceWriter<W> {
    type Error = TraceError;
    fn record(&mut self, record: &TraceRecord) -> Result<(), TraceError> {
        self.line += 1;
        self.order
            .check(record)
            .map_err(|source| TraceError::Order { line: self.line, source })?;
        writeln!(self.out, "{}", format_record(record))?;
        Ok(())
    }
}

/// Parses the fields of one line, reporting the line number on failure.
struct Fields<'a> {
    line: usize,
    parts: std::str::Split<'a, char>,
}

impl<'a> Fields<'a> {
    fn err(&self, message: impl Into<String>) -> TraceError {
        TraceError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, TraceError> {
        self.parts.next().ok_or_else(|| self.err(format!("missing field {what}")))
    }

    fn parse<T: FromStr>(&mut self, what: &str) -> Result<T, TraceError> {
        let raw = self.next(what)?;
        raw.parse().map_err(|_| self.err(format!("bad {what} {raw:?}")))
    }

    fn list<T: FromStr>(&mut self, what: &str) -> Result<Vec<T>, TraceError> {
        let raw = self.next(what)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|x| x.parse().map_err(|_| self.err(format!("bad {what} entry {x:?}"))))
            .collect()
    }

    fn end(mut self) -> Result<(), TraceError> {
        match self.parts.next() {
            None => Ok(()),
            Some(_) => Err(self.err("too many fields")),
        }
    }
}

fn parse_header(f: &mut Fields) -> Result<Header, TraceError> {
    let version = f.next("format version")?;
    if version != FORMAT_VERSION {
        return Err(TraceError::UnsupportedVersion {
            line: f.line,
            found: version.to_owned(),
        });
    }
    let config_digest = f.next("config digest")?.to_owned();
    let seed = f.parse("seed")?;
    let n = f.parse("n")?;
    let control_raw = f.next("control")?;
    let control = match control_raw.split('/').collect::<Vec<_>>()[..] {
        ["cell-view"] => Control::CellView,
        ["traditional", a, d] => Control::Traditional {
            algorithm: a.parse().map_err(|_| f.err(format!("bad algorithm {a:?}")))?,
            direction: d.parse().map_err(|_| f.err(format!("bad direction {d:?}")))?,
        },
        _ => return Err(f.err(format!("bad control {control_raw:?}"))),
    };
    let reference_direction = f.parse("reference direction")?;
    let roster_raw = f.next("roster")?;
    let roster = roster_raw
        .split(',')
        .map(|entry| {
            let bad = || f.err(format!("bad roster entry {entry:?}"));
            let [a, d, z, g] = entry.split('/').collect::<Vec<_>>()[..] else {
                return Err(bad());
            };
            Ok(RosterEntry {
                algotype: a.parse::<Algorithm>().map_err(|_| bad())?,
                direction: d.parse::<Direction>().map_err(|_| bad())?,
                frozen: z.parse::<FrozenKind>().map_err(|_| bad())?,
                group: g.parse().map_err(|_| bad())?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let initial_values = f.list("initial values")?;
    if roster.len() != n || initial_values.len() != n {
        return Err(f.err(format!("header declares n = {n} but lists {} cells", roster.len())));
    }
    Ok(Header {
        format_version: version.to_owned(),
        config_digest,
        seed,
        n,
        control,
        reference_direction,
        roster,
        initial_values,
    })
}

fn parse_event(f: &mut Fields) -> Result<Event, TraceError> {
    let round = f.parse("round")?;
    let kind_raw = f.next("event kind")?;
    let kind = match kind_raw {
        "compare" => EventKind::Compare,
        "swap" => EventKind::Swap,
        "denied/initiator-frozen" => EventKind::SwapDenied(DenyReason::InitiatorFrozen),
        "denied/immovable" => EventKind::SwapDenied(DenyReason::FrozenImmovable),
        other => return Err(f.err(format!("bad event kind {other:?}"))),
    };
    let actor = match f.next("actor")? {
        "controller" => Actor::Controller,
        id => Actor::Cell(id.parse().map_err(|_| f.err(format!("bad actor {id:?}")))?),
    };
    Ok(Event {
        round,
        kind,
        actor,
        index_a: f.parse("index a")?,
        index_b: f.parse("index b")?,
        value_a: f.parse("value a")?,
        value_b: f.parse("value b")?,
        algotype_a: f.parse("algotype a")?,
        algotype_b: f.parse("algotype b")?,
    })
}

fn parse_snapshot(f: &mut Fields) -> Result<Snapshot, TraceError> {
    let round = f.parse("round")?;
    let event_index = f.parse("event index")?;
    let trigger = match f.next("trigger")? {
        "initial" => SnapshotTrigger::Initial,
        "swap" => SnapshotTrigger::Swap,
        "round-end" => SnapshotTrigger::RoundEnd,
        other => return Err(f.err(format!("bad trigger {other:?}"))),
    };
    let sortedness = f.parse("sortedness")?;
    let monotonicity_error = f.parse("monotonicity error")?;
    let aggregation_value = match f.next("aggregation")? {
        "-" => None,
        raw => Some(raw.parse().map_err(|_| f.err(format!("bad aggregation {raw:?}")))?),
    };
    Ok(Snapshot {
        round,
        event_index,
        trigger,
        sortedness,
        monotonicity_error,
        aggregation_value,
    })
}

fn parse_footer(f: &mut Fields) -> Result<Footer, TraceError> {
    Ok(Footer {
        swaps: f.parse("swaps")?,
        comparisons: f.parse("comparisons")?,
        denied: f.parse("denied")?,
        rounds: f.parse("rounds")?,
        activations: f.parse("activations")?,
        terminated_by: f.parse::<TerminatedBy>("terminated by")?,
        final_ids: f.list("final ids")?,
    })
}

/// Parse one line. `line` is 1-based and only used in errors.
pub fn parse_record(text: &str, line: usize) -> Result<TraceRecord, TraceError> {
    let mut f = Fields {
        line,
        parts: text.split('\t'),
    };
    let record = match f.next("record kind")? {
        "H" => TraceRecord::Header(parse_header(&mut f)?),
        "E" => TraceRecord::Event(parse_event(&mut f)?),
        "S" => TraceRecord::Snapshot(parse_snapshot(&mut f)?),
        "F" => TraceRecord::Footer(parse_footer(&mut f)?),
        tag => return Err(f.err(format!("unknown record kind {tag:?}"))),
    };
    f.end()?;
    Ok(record)
}

/// Read a whole trace, checking record order and that it is complete.
pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, TraceError> {
    let mut order = RecordOrder::default();
    let mut records = Vec::new();
    for (i, text) in input.lines().enumerate() {
        let text = text?;
        let record = parse_record(&text, i + 1)?;
        order
            .check(&record)
            .map_err(|source| TraceError::Order { line: i + 1, source })?;
        records.push(record);
    }
    if !order.is_closed() {
        return Err(TraceError::MissingFooter);
    }
    Ok(records)
}

pub fn load_trace(path: &Path) -> Result<Vec<TraceRecord>, TraceError> {
    read_trace(BufReader::new(File::open(path)?))
}

pub fn write_trace<W: Write>(out: W, records: &[TraceRecord]) -> Result<W, TraceError> {
    let mut w = TraceWriter::new(out);
    for r in records {
        w.record(r)?;
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cellsort_core::probe::MemoryProbe;
    use cellsort_core::{make_array, Engine, SchedulerConfig};

    fn sample(frozen: &[(usize, FrozenKind)], control: Control) -> Vec<TraceRecord> {
        let state = make_array(
            &[3, 1, 2, 5, 4],
            &[Algorithm::Bubble, Algorithm::Selection, Algorithm::Insertion, Algorithm::Bubble, Algorithm::Bubble],
            &[Direction::Increasing; 5],
            frozen,
        )
        .unwrap();
        let mut probe = MemoryProbe::new();
        Engine::new(state, control, SchedulerConfig::new(4), &mut probe)
            .with_digest("abc")
            .run()
            .unwrap();
        probe.records
    }

    fn round_trip(records: &[TraceRecord]) -> Vec<TraceRecord> {
        let bytes = write_trace(Vec::new(), records).unwrap();
        read_trace(&bytes[..]).unwrap()
    }

    #[test]
    fn generated_traces_round_trip() {
        for control in [
            Control::CellView,
            Control::Traditional {
                algorithm: Algorithm::Insertion,
                direction: Direction::Decreasing,
            },
        ] {
            let t = sample(&[(1, FrozenKind::FrozenImmovable), (3, FrozenKind::FrozenMovable)], control);
            assert!(t.iter().any(|r| matches!(r, TraceRecord::Event(e) if matches!(e.kind, EventKind::SwapDenied(_)))));
            assert_eq!(round_trip(&t), t);
        }
    }

    #[test]
    fn truncated_trace_names_the_footer() {
        let t = sample(&[], Control::CellView);
        let bytes = write_trace(Vec::new(), &t[..t.len() - 1]);
        // The writer accepts an unfinished trace; the reader does not.
        let err = read_trace(&bytes.unwrap()[..]).unwrap_err();
        assert!(matches!(err, TraceError::MissingFooter));
        assert!(err.to_string().contains("footer"));
    }

    #[test]
    fn version_and_syntax_errors_carry_line_numbers() {
        let t = sample(&[], Control::CellView);
        let text = String::from_utf8(write_trace(Vec::new(), &t).unwrap()).unwrap();
        let future = text.replacen(FORMAT_VERSION, "cellsort-trace/9", 1);
        assert!(matches!(
            read_trace(future.as_bytes()).unwrap_err(),
            TraceError::UnsupportedVersion { line: 1, .. }
        ));
        let mut lines: Vec<&str> = text.lines().collect();
        lines[2] = "E\t1\tteleport";
        let broken = lines.join("\n");
        match read_trace(broken.as_bytes()).unwrap_err() {
            TraceError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn writer_rejects_records_before_the_header() {
        let t = sample(&[], Control::CellView);
        let mut w = TraceWriter::new(Vec::new());
        assert!(matches!(w.record(&t[1]), Err(TraceError::Order { line: 1, .. })));
    }
}
