use std::io::{Read, Write};
use std::path::Path;

use super::EnergyTrace;
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["slot", "node_id", "mj"];

/// Read every trace from a `slot,node_id,mj` file.
pub fn load_trace_csv(path: impl AsRef<Path>) -> Result<Vec<EnergyTrace>> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_trace_csv(file)
}

/// Parse traces from any reader. Rows must be sorted by `(node_id, slot)`
/// and each node's slots must run 0, 1, 2, ... without gaps.
pub fn read_trace_csv<R: Read>(reader: R) -> Result<Vec<EnergyTrace>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `slot,node_id,mj`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut traces = Vec::new();
    let mut current: Option<(usize, Vec<f64>)> = None;
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let field = |idx: usize, name: &str| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {name}"),
            })
        };
        let slot: u64 = field(0, "slot")?.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad slot `{}`", &record[0]),
        })?;
        let node: usize = field(1, "node_id")?.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad node_id `{}`", &record[1]),
        })?;
        let mj: f64 = field(2, "mj")?.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad energy `{}`", &record[2]),
        })?;
        if !mj.is_finite() || mj < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("energy must be a non-negative number, got {mj}"),
            });
        }

        match &mut current {
            Some((id, samples)) if *id == node => {
                let expected = samples.len() as u64;
                if slot != expected {
                    return Err(Error::Parse {
                        line,
                        message: format!("node {node}: expected slot {expected}, found {slot} (gap or disorder)"),
                    });
                }
                samples.push(mj);
            }
            _ => {
                if let Some((id, samples)) = current.take() {
                    if node < id {
                        return Err(Error::Parse {
                            line,
                            message: format!("node {node} follows node {id}; rows must be sorted by node_id"),
                        });
                    }
                    traces.push(EnergyTrace::from_samples(id, samples));
                }
                if slot != 0 {
                    return Err(Error::Parse {
                        line,
                        message: format!("node {node}: first slot must be 0, found {slot}"),
                    });
                }
                current = Some((node, vec![mj]));
            }
        }
    }
    if let Some((id, samples)) = current {
        traces.push(EnergyTrace::from_samples(id, samples));
    }
    Ok(traces)
}

pub fn write_trace_csv<W: Write>(writer: W, traces: &[EnergyTrace]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(HEADER)?;
    let mut sorted: Vec<&EnergyTrace> = traces.iter().collect();
    sorted.sort_by_key(|t| t.node_id);
    for t in sorted {
        for slot in 0..t.len() {
            wtr.write_record([
                slot.to_string(),
                t.node_id.to_string(),
                format!("{:.9e}", t.at(slot)),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::Regime;

    #[test]
    fn two_nodes_three_slots() {
        let text = "slot,node_id,mj\n0,0,1.0\n1,0,1.0\n2,0,1.0\n0,1,2.0\n1,1,3.0\n2,1,4.0\n";
        let t = read_trace_csv(text.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].len(), 3);
        assert_eq!(t[1].len(), 3);
        assert_eq!(t[0].regime, Regime::ConstantPerNode);
        assert_eq!(t[1].regime, Regime::VariableOverTime);
        assert_eq!(t[1].to_vec(), vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn gap_names_line_and_slot() {
        let text = "slot,node_id,mj\n0,0,1.0\n2,0,1.0\n";
        match read_trace_csv(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("expected slot 1"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_and_malformed_rejected() {
        let neg = "slot,node_id,mj\n0,0,-1.0\n";
        assert!(matches!(read_trace_csv(neg.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let bad = "slot,node_id,mj\n0,0,abc\n";
        assert!(matches!(read_trace_csv(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let short = "slot,node_id,mj\n0,0\n";
        assert!(matches!(read_trace_csv(short.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let header = "slot,node,mj\n0,0,1\n";
        assert!(matches!(read_trace_csv(header.as_bytes()), Err(Error::Parse { line: 1, .. })));
        let unsorted = "slot,node_id,mj\n0,1,1\n0,0,1\n";
        assert!(read_trace_csv(unsorted.as_bytes()).is_err());
    }

    #[test]
    fn round_trip() {
        let traces = vec![
            EnergyTrace::from_samples(0, vec![0.5, 1.25, 3.0]),
            EnergyTrace::constant(1, 7.0, 3),
        ];
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &traces).unwrap();
        let back = read_trace_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0].to_vec(), traces[0].to_vec());
        assert_eq!(back[1].to_vec(), traces[1].to_vec());
    }
}
