use std::io::{Read, Write};

use crate::encoding::Bitstring;
use crate::error::{Error, Result};
use crate::sweep::{Algorithm, ExperimentRecord};

pub const CSV_HEADER: [&str; 10] = [
    "risk",
    "algorithm",
    "config",
    "energy",
    "bits",
    "feasible",
    "matched",
    "energy_gap",
    "evals",
    "seed",
];

// 17 significant digits, enough to round-trip any f64
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            sci(r.risk),
            r.algorithm.to_string(),
            r.label.clone(),
            sci(r.energy),
            r.bits.to_string(),
            r.feasible.to_string(),
            r.matched.to_string(),
            sci(r.energy_gap),
            r.evals.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::MalformedCsv(format!("unexpected header {header:?}")));
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let field = |k: usize| rec.get(k).unwrap_or_default();
            let bad = |k: usize| Error::MalformedCsv(format!("row {i}: bad {} {:?}", CSV_HEADER[k], field(k)));
            let num = |k: usize| field(k).parse::<f64>().map_err(|_| bad(k));
            let flag = |k: usize| field(k).parse::<bool>().map_err(|_| bad(k));
            Ok(ExperimentRecord {
                risk: num(0)?,
                algorithm: field(1).parse::<Algorithm>()?,
                label: field(2).to_string(),
                energy: num(3)?,
                bits: field(4).parse::<Bitstring>()?,
                feasible: flag(5)?,
                matched: flag(6)?,
                energy_gap: num(7)?,
                evals: field(8).parse().map_err(|_| bad(8))?,
                seed: field(9).parse().map_err(|_| bad(9))?,
            })
        })
        .collect()
}
