use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::pressure::SymbolTable;

use super::fmt_f64;

/// Columns `k1[,k2,k3],m`: signed lattice indices and the symbol value.
pub fn write_symbol_csv(table: &SymbolTable, w: impl Write) -> Result<()> {
    let g = table.grid;
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=g.dim()).map(|i| format!("k{i}")).collect();
    header.push("m".into());
    out.write_record(&header).map_err(csv_err)?;
    for (f, m) in table.values.iter().enumerate() {
        let k = g.wavenumbers(f);
        let mut row: Vec<String> = k[..g.dim()].iter().map(|v| v.to_string()).collect();
        row.push(fmt_f64(*m));
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Every lattice index of `grid` must appear exactly once.
pub fn read_symbol_csv(grid: GridSpec, r: impl Read) -> Result<SymbolTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let n = grid.dim();
    let expected: Vec<String> = (1..=n).map(|i| format!("k{i}")).chain(["m".to_string()]).collect();
    if header.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(Error::Format(format!("symbol CSV header must be {}", expected.join(","))));
    }
    let mut seen: HashMap<usize, f64> = HashMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = line + 2;
        let mut k = [0i64; 3];
        for i in 0..n {
            k[i] = rec[i]
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("row {row}: bad index {:?}", &rec[i])))?;
        }
        let m: f64 = rec[n].trim().parse().map_err(|_| Error::Format(format!("row {row}: bad value {:?}", &rec[n])))?;
        if !m.is_finite() {
            return Err(Error::Format(format!("row {row}: symbol value must be finite")));
        }
        let f = grid
            .flat_of_k(k)
            .ok_or_else(|| Error::Format(format!("row {row}: index {:?} outside the grid", &k[..n])))?;
        if seen.insert(f, m).is_some() {
            return Err(Error::Format(format!("row {row}: duplicate index {:?}", &k[..n])));
        }
    }
    if seen.len() != grid.len() {
        return Err(Error::Format(format!("symbol CSV covers {} of {} lattice points", seen.len(), grid.len())));
    }
    let values = (0..grid.len()).map(|f| seen[&f]).collect();
    Ok(SymbolTable { grid, values })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
