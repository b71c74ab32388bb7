//! File formats and atomic file output.
//!
//! Complex matrices are stored one matrix row per CSV line, each entry as
//! two fields `re,im`, without a header.

use std::fs;
use std::io::Write;
use std::path::Path;

use asi_core::{CMatrix, Complex64, Constellation};

use crate::error::{SimError, SimResult};
use crate::harness::BerRecord;

pub const RESULTS_HEADER: [&str; 9] = [
    "detector",
    "snr_db",
    "satellite",
    "bits",
    "errors",
    "ber",
    "ci_lo",
    "ci_hi",
    "mean_squarings",
];

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> SimResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| SimError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| SimError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| SimError::io(path, e))?;
    tmp.persist(path).map_err(|e| SimError::io(path, e.error))?;
    Ok(())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("writing to memory cannot fail")
}

/// Results table with [`RESULTS_HEADER`].
pub fn results_csv(records: &[BerRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.detector.clone(),
            r.snr_db.to_string(),
            r.satellite.to_string(),
            r.bits.to_string(),
            r.errors.to_string(),
            r.ber.to_string(),
            r.ci95.lo.to_string(),
            r.ci95.hi.to_string(),
            r.mean_squarings.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

// Shortest round-trip form, without negative zero.
fn real(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        x.to_string()
    }
}

/// `re,im` pairs, one matrix row per line.
pub fn complex_csv(m: &CMatrix) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in 0..m.rows() {
        let fields: Vec<String> = m.row(r).iter().flat_map(|z| [real(z.re), real(z.im)]).collect();
        w.write_record(&fields).expect("in-memory write");
    }
    finish(w)
}

/// Parses the format of [`complex_csv`].
pub fn parse_complex_csv(text: &str, origin: &Path) -> SimResult<CMatrix> {
    let fail = |message: String| SimError::Format {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.len() % 2 != 0 {
            return Err(fail(format!("line {line}: odd number of fields, expected re,im pairs")));
        }
        let n = rec.len() / 2;
        if *cols.get_or_insert(n) != n {
            return Err(fail(format!(
                "line {line}: {n} entries, previous rows have {}",
                cols.unwrap_or(0)
            )));
        }
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| fail(format!("line {line}: '{f}' is not a number")))
            })
            .collect::<SimResult<_>>()?;
        data.extend(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])));
        rows += 1;
    }
    let cols = cols.ok_or_else(|| fail("no data".into()))?;
    CMatrix::from_row_major(rows, cols, data).map_err(|e| fail(e.to_string()))
}

pub fn read_complex_csv(path: &Path) -> SimResult<CMatrix> {
    let text = fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    parse_complex_csv(&text, path)
}

/// `index,label,bits,re,im`, one line per point.
pub fn constellation_csv(c: &Constellation) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "label", "bits", "re", "im"])
        .expect("in-memory write");
    let width = c.bits_per_symbol();
    for (i, (p, l)) in c.points().iter().zip(c.labels()).enumerate() {
        w.write_record([
            i.to_string(),
            l.to_string(),
            format!("{l:0width$b}"),
            p.re.to_string(),
            p.im.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Gnuplot script drawing BER against SNR for `satellite`, one curve per
/// detector, from the results file `csv_name` in the same directory.
pub fn gnuplot_script(csv_name: &str, detectors: &[String], satellite: usize) -> String {
    let png = Path::new(csv_name).with_extension("png");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 800,600\n");
    s.push_str(&format!("set output '{}'\n", png.display()));
    s.push_str("set logscale y\n");
    s.push_str("set format y '10^{%L}'\n");
    s.push_str("set grid\n");
    s.push_str("set xlabel 'SNR [dB]'\n");
    s.push_str(&format!("set ylabel 'BER, satellite {satellite}'\n"));
    s.push_str("set key bottom left\n");
    let curves: Vec<String> = detectors
        .iter()
        .map(|d| {
            format!(
                "  '{csv_name}' skip 1 using (strcol(1) eq '{d}' && $3 == {satellite} && $6 > 0 ? $2 : 1/0):6 \
                 with linespoints title '{d}'"
            )
        })
        .collect();
    s.push_str("plot \\\n");
    s.push_str(&curves.join(", \\\n"));
    s.push('\n');
    s
}
