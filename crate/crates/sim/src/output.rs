//! File formats: the versioned records CSV, summary tables, run metadata,
//! and atomic writes.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use tot_core::recall::{Chronometry, Classification};
use tot_core::scenario::TrialRecord;
use tot_core::ScenarioConfig;

use crate::summary::{Estimate, SummaryRow};

pub const RECORDS_SCHEMA: &str = "tot-records/1";

pub const RECORDS_HEADER: [&str; 13] = [
    "trial",
    "sweep_q",
    "sweep_d",
    "episode",
    "classification",
    "sel_completeness",
    "att_sem",
    "att_lex",
    "att_phon",
    "tot_strength",
    "slot_first_letter",
    "total_time_ms",
    "seed_child",
];

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("records header mismatch: {0}")]
    Header(String),
    #[error("line {line}: column {column}: {message}")]
    Field {
        line: u64,
        column: &'static str,
        message: String,
    },
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn record_row(r: &TrialRecord) -> [String; 13] {
    [
        r.trial.to_string(),
        opt_f64(r.sweep_q),
        opt_f64(r.sweep_d),
        r.episode.to_string(),
        r.classification.to_string(),
        r.sel_completeness.to_string(),
        r.att_sem.to_string(),
        r.att_lex.to_string(),
        r.att_phon.to_string(),
        r.tot_strength.to_string(),
        r.slot_first_letter
            .map_or_else(String::new, |b| u8::from(b).to_string()),
        format!("{:.3}", r.total_time_ms),
        r.seed_child.to_string(),
    ]
}

pub fn write_records_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        w.write_record(record_row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_csv_string(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_records_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn parse_field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: u64,
) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    rec[i].parse().map_err(|e: T::Err| FormatError::Field {
        line,
        column: RECORDS_HEADER[i],
        message: e.to_string(),
    })
}

fn parse_opt<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: u64,
) -> Result<Option<T>, FormatError>
where
    T::Err: std::fmt::Display,
{
    if rec[i].is_empty() {
        Ok(None)
    } else {
        parse_field(rec, i, line).map(Some)
    }
}

pub fn read_records_csv<R: io::Read>(input: R) -> Result<Vec<TrialRecord>, FormatError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header != RECORDS_HEADER {
        return Err(FormatError::Header(header.join(",")));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let slot = match &rec[10] {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => {
                return Err(FormatError::Field {
                    line,
                    column: "slot_first_letter",
                    message: format!("expected 0, 1 or empty, found {other:?}"),
                })
            }
        };
        out.push(TrialRecord {
            trial: parse_field(&rec, 0, line)?,
            sweep_q: parse_opt(&rec, 1, line)?,
            sweep_d: parse_opt(&rec, 2, line)?,
            episode: parse_field(&rec, 3, line)?,
            classification: parse_field::<Classification>(&rec, 4, line)?,
            sel_completeness: parse_field(&rec, 5, line)?,
            att_sem: parse_field(&rec, 6, line)?,
            att_lex: parse_field(&rec, 7, line)?,
            att_phon: parse_field(&rec, 8, line)?,
            tot_strength: parse_field(&rec, 9, line)?,
            slot_first_letter: slot,
            total_time_ms: parse_field(&rec, 11, line)?,
            seed_child: parse_field(&rec, 12, line)?,
        });
    }
    Ok(out)
}

/// Checks emitted records against the classification invariants and the
/// config's budgets and timing. Returns one message per violation.
pub fn check_records(records: &[TrialRecord], cfg: &ScenarioConfig) -> Vec<String> {
    let mut bad = Vec::new();
    let timing = Chronometry::new(cfg.recall.spike_ms, cfg.recall.interval_ms).ok();
    let max = &cfg.recall.max_attempts;
    let mut prev: Option<&TrialRecord> = None;
    for (i, r) in records.iter().enumerate() {
        let mut fail = |msg: &str| {
            bad.push(format!(
                "record {i} (trial {}, episode {}): {msg}",
                r.trial, r.episode
            ))
        };
        let atts = [r.att_sem, r.att_lex, r.att_phon];
        let limits = [max.semantic, max.lexical, max.phonological];
        if atts.iter().zip(limits).any(|(&a, m)| a > m) {
            fail("attempts exceed max_attempts");
        }
        if !(0.0..=1.0).contains(&r.tot_strength) {
            fail("tot_strength outside [0, 1]");
        }
        match r.classification {
            Classification::NoAccess => {
                if atts != [0, 0, 0] || r.total_time_ms != 0.0 || r.tot_strength != 0.0 {
                    fail("NoAccess record attempted recall");
                }
                if r.slot_first_letter.is_some() {
                    fail("NoAccess record reports partial information");
                }
            }
            Classification::Resolved => {
                if atts.contains(&0) {
                    fail("Resolved record skipped a component");
                }
                if r.tot_strength != 1.0 {
                    fail("Resolved record must have tot_strength 1");
                }
                if r.slot_first_letter == Some(false) {
                    fail("Resolved record missed its own first-letter slot");
                }
                if r.sel_completeness < cfg.lexicon.selection_threshold {
                    fail("Resolved record below selection threshold");
                }
            }
            Classification::Tot => {
                if r.att_sem == 0 {
                    fail("TOT record never attempted the semantic component");
                }
                if (r.att_phon > 0 && r.att_lex == 0) || (r.att_phon == 0 && r.tot_strength != 0.0)
                {
                    fail("TOT record breaks the component cascade");
                }
                if r.sel_completeness < cfg.lexicon.selection_threshold {
                    fail("TOT record below selection threshold");
                }
            }
        }
        if let Some(t) = timing {
            let expect: f64 = atts.iter().map(|&a| t.elapsed_ms(a)).sum();
            if (expect - r.total_time_ms).abs() > 5e-4 + expect * 1e-12 {
                fail("total_time_ms disagrees with chronometry");
            }
        }
        if r.episode == 0 || r.episode > cfg.episodes_per_trial {
            fail("episode index out of range");
        }
        if r.episode > 1 {
            let follows = prev.is_some_and(|p| {
                p.trial == r.trial
                    && p.episode + 1 == r.episode
                    && p.classification != Classification::Resolved
            });
            if !follows {
                fail("later episode without an unresolved predecessor");
            }
        }
        prev = Some(r);
    }
    bad
}

fn est_cells(e: &Estimate) -> [String; 3] {
    [e.value.to_string(), e.lo.to_string(), e.hi.to_string()]
}

pub const SUMMARY_HEADER: [&str; 32] = [
    "point",
    "sweep_q",
    "sweep_d",
    "sweep_flip",
    "records",
    "trials",
    "resolution_rate",
    "resolution_lo",
    "resolution_hi",
    "tot_rate",
    "tot_lo",
    "tot_hi",
    "no_access_rate",
    "no_access_lo",
    "no_access_hi",
    "strong_tot_share",
    "strong_tot_lo",
    "strong_tot_hi",
    "first_letter_rate",
    "first_letter_lo",
    "first_letter_hi",
    "mean_att_phon",
    "median_att_phon",
    "mean_att_total",
    "phon_attempt_success",
    "mean_time_ms",
    "time_lo",
    "time_hi",
    "trial_resolution_rate",
    "trial_resolution_lo",
    "trial_resolution_hi",
    "eventual_resolutions",
];

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        let mut cells = vec![
            r.point.to_string(),
            opt_f64(r.sweep_q),
            opt_f64(r.sweep_d),
            opt_f64(r.sweep_flip),
            r.records.to_string(),
            r.trials.to_string(),
        ];
        for e in [
            &r.resolution,
            &r.tot,
            &r.no_access,
            &r.strong_tot,
            &r.first_letter,
        ] {
            cells.extend(est_cells(e));
        }
        cells.extend([
            r.mean_att_phon.to_string(),
            r.median_att_phon.to_string(),
            r.mean_att_total.to_string(),
            r.phon_attempt_success.to_string(),
        ]);
        cells.extend(est_cells(&r.time_ms));
        cells.extend(est_cells(&r.trial_resolution));
        cells.push(r.eventual_resolutions.to_string());
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to reproduce a run byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub records_schema: &'static str,
    pub seed: u64,
    pub interval_method: &'static str,
    pub defaults_applied: &'a [String],
    pub n_records: usize,
    pub files: Vec<String>,
    pub config: &'a ScenarioConfig,
}

/// Writes all `(name, bytes)` files into `dir` via temporaries, renaming
/// them into place only after every temporary was written.
pub fn write_atomically(dir: &Path, files: &[(String, Vec<u8>)]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, bytes) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(name)));
    }
    staged
        .into_iter()
        .map(|(tmp, dest)| tmp.persist(&dest).map(|_| dest).map_err(|e| e.error))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_record() -> impl Strategy<Value = TrialRecord> {
        (
            any::<u64>(),
            proptest::option::of(0.0f64..=1.0),
            proptest::option::of(0.0f64..=1.0),
            1u32..5,
            0usize..3,
            0.0f64..=1.0,
            (0u32..100, 0u32..100, 0u32..100),
            proptest::option::of(any::<bool>()),
            0u64..10_000_000,
            any::<u64>(),
        )
            .prop_map(
                |(trial, q, d, episode, c, strength, (a, b, p), slot, millis, seed)| TrialRecord {
                    trial,
                    sweep_q: q,
                    sweep_d: d,
                    episode,
                    classification: [
                        Classification::Resolved,
                        Classification::Tot,
                        Classification::NoAccess,
                    ][c],
                    sel_completeness: strength / 3.0,
                    att_sem: a,
                    att_lex: b,
                    att_phon: p,
                    tot_strength: strength,
                    slot_first_letter: slot,
                    total_time_ms: millis as f64 / 1000.0,
                    seed_child: seed,
                },
            )
    }

    proptest! {
        #[test]
        fn records_round_trip_through_csv(records in proptest::collection::vec(arb_record(), 0..20)) {
            let text = records_csv_string(&records);
            prop_assert_eq!(read_records_csv(text.as_bytes()).unwrap(), records);
        }
    }

    #[test]
    fn header_is_exact() {
        let text = records_csv_string(&[]);
        assert_eq!(
            text,
            "trial,sweep_q,sweep_d,episode,classification,sel_completeness,att_sem,att_lex,att_phon,tot_strength,slot_first_letter,total_time_ms,seed_child\n"
        );
        assert!(read_records_csv("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn booleans_and_times_are_formatted() {
        let r = TrialRecord {
            trial: 3,
            sweep_q: Some(0.4),
            sweep_d: None,
            episode: 1,
            classification: Classification::Tot,
            sel_completeness: 1.0,
            att_sem: 3,
            att_lex: 0,
            att_phon: 0,
            tot_strength: 0.0,
            slot_first_letter: Some(false),
            total_time_ms: 23.0,
            seed_child: 99,
        };
        let text = records_csv_string(&[r]);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "3,0.4,,1,TOT,1,3,0,0,0,0,23.000,99"
        );
    }

    #[test]
    fn atomic_write_places_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        let paths = write_atomically(
            &out,
            &[
                ("a.txt".into(), b"x".to_vec()),
                ("b.txt".into(), b"y".to_vec()),
            ],
        )
        .unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(std::fs::read(out.join("b.txt")).unwrap(), b"y");
        assert_eq!(std::fs::read_dir(&out).unwrap().count(), 2);
    }
}
