use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lp::FBNormParams;
use crate::record::{FbSeries, TrajectoryRecord};

use super::fmt_f64;

/// Header for one derived series, e.g. `fb_norm(beta=0.5;q=2)`.
pub fn fb_column_name(params: FBNormParams) -> String {
    format!("fb_norm(beta={};q={})", params.beta, params.q)
}

fn parse_fb_column(name: &str, p: Exponent) -> Result<FBNormParams> {
    let bad = || Error::Format(format!("unrecognized column {name:?}"));
    let inner = name.strip_prefix("fb_norm(").and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
    let (b, q) = inner.split_once(';').ok_or_else(bad)?;
    let beta: f64 = b.strip_prefix("beta=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let q: Exponent = q.strip_prefix("q=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    Ok(FBNormParams::new(beta, p, q))
}

/// Long format, one row per `(t, j)`: `t, j, p, block_norm, fb_norm(...)…, blowup_integral, mean_re, mean_im`.
/// Per-time columns repeat on every block row.
pub fn write_trajectory_csv(rec: &TrajectoryRecord, w: impl Write) -> Result<()> {
    rec.validate()?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string(), "j".into(), "p".into(), "block_norm".into()];
    header.extend(rec.fb_norms.iter().map(|s| fb_column_name(s.params)));
    header.extend(["blowup_integral".to_string(), "mean_re".into(), "mean_im".into()]);
    out.write_record(&header).map_err(csv_err)?;
    let opt = |v: Option<&f64>| v.map(|x| fmt_f64(*x)).unwrap_or_default();
    for (i, t) in rec.times.iter().enumerate() {
        for (b, norm) in rec.block_norms[i].iter().enumerate() {
            let mut row = vec![fmt_f64(*t), (rec.j_min + b as i32).to_string(), rec.p.to_string(), fmt_f64(*norm)];
            row.extend(rec.fb_norms.iter().map(|s| fmt_f64(s.values[i])));
            row.push(opt(rec.blowup_integral.get(i)));
            let mean = rec.mean_mode.get(i);
            row.push(opt(mean.map(|m| &m.re)));
            row.push(opt(mean.map(|m| &m.im)));
            out.write_record(&row).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory_csv(r: impl Read) -> Result<TrajectoryRecord> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(|s| s.trim().to_string()).collect();
    let k = header.len();
    if k < 7 || header[..4] != ["t", "j", "p", "block_norm"] || header[k - 3..] != ["blowup_integral", "mean_re", "mean_im"] {
        return Err(Error::Format(
            "trajectory CSV header must start with t,j,p,block_norm and end with blowup_integral,mean_re,mean_im".into(),
        ));
    }
    let rows: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>().map_err(csv_err)?;
    if rows.is_empty() {
        return Err(Error::Format("trajectory CSV has no data rows".into()));
    }
    let num = |row: usize, col: usize, rec: &csv::StringRecord| -> Result<f64> {
        rec[col]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("row {}: column {} is not a number: {:?}", row + 2, header[col], &rec[col])))
    };
    let p: Exponent = rows[0][2].trim().parse().map_err(|_| Error::Format(format!("bad p value {:?}", &rows[0][2])))?;
    let fb_params = header[4..k - 3].iter().map(|h| parse_fb_column(h, p)).collect::<Result<Vec<_>>>()?;

    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        j_min: 0,
        p,
        block_norms: Vec::new(),
        fb_norms: fb_params.iter().map(|&params| FbSeries { params, values: Vec::new() }).collect(),
        blowup_integral: Vec::new(),
        mean_mode: Vec::new(),
    };
    let mut optional_missing = false;
    let mut next_j = 0;
    let mut first_of_time = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != k {
            return Err(Error::Format(format!("row {} has {} fields, expected {k}", i + 2, row.len())));
        }
        let t = num(i, 0, row)?;
        let j: i32 = row[1].trim().parse().map_err(|_| Error::Format(format!("row {}: bad block index", i + 2)))?;
        if row[2].trim().parse::<Exponent>().ok() != Some(p) {
            return Err(Error::Format(format!("row {}: p differs from the first row", i + 2)));
        }
        let new_time = rec.times.last() != Some(&t);
        if new_time {
            if let Some(prev) = rec.block_norms.last() {
                if rec.block_norms.len() > 1 && prev.len() != rec.block_norms[0].len() {
                    return Err(Error::Format(format!("row {}: ragged block rows", i + 2)));
                }
            }
            if rec.times.is_empty() {
                rec.j_min = j;
            }
            if j != rec.j_min {
                return Err(Error::Format(format!("row {}: time {t} starts at block {j}, expected {}", i + 2, rec.j_min)));
            }
            rec.times.push(t);
            rec.block_norms.push(Vec::new());
            for (s, col) in rec.fb_norms.iter_mut().zip(4..) {
                s.values.push(num(i, col, row)?);
            }
            let tail: Vec<&str> = (k - 3..k).map(|c| row[c].trim()).collect();
            if tail.iter().any(|s| s.is_empty()) {
                optional_missing = true;
            } else {
                rec.blowup_integral.push(num(i, k - 3, row)?);
                rec.mean_mode.push(Complex64::new(num(i, k - 2, row)?, num(i, k - 1, row)?));
            }
            next_j = j;
            first_of_time = i;
        } else if (4..k).any(|c| row[c].trim() != rows[first_of_time][c].trim()) {
            // per-time columns repeat on every block row
            return Err(Error::Format(format!("row {}: per-time columns disagree with row {}", i + 2, first_of_time + 2)));
        }
        if j != next_j {
            return Err(Error::Format(format!("row {}: block {j} out of sequence, expected {next_j}", i + 2)));
        }
        next_j += 1;
        rec.block_norms.last_mut().expect("pushed").push(num(i, 3, row)?);
    }
    if optional_missing {
        rec.blowup_integral.clear();
        rec.mean_mode.clear();
    }
    rec.validate().map_err(|e| Error::Format(e.to_string()))?;
    Ok(rec)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
