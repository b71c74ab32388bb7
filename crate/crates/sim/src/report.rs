//! Human-readable summaries of a sweep.

use std::fmt::Write;

use asi_core::Modulation;

use crate::harness::BerRecord;

/// Published complexity figures, in percent of exhaustive search, for the
/// detector labels they were reported under.
pub fn reference_percent(modulation: Modulation, label: &str) -> Option<f64> {
    let table: &[(&str, f64)] = match modulation {
        Modulation::Psk8 => &[
            ("JML", 100.0),
            ("LGSD(2/3/2)", 67.0),
            ("E-LGSD(2/3/2)", 67.0),
            ("E-LGSD(2/2/1)", 35.0),
            ("E-LGSD(2/2/2)", 63.0),
            ("E-LGSD(2/3/1)", 39.0),
            ("E-LGSD(3/2/1)", 53.0),
        ],
        Modulation::Apsk16 => &[
            ("JML", 100.0),
            ("LGSD(2/3/2)", 16.0),
            ("E-LGSD(2/3/2)", 16.0),
            ("E-LGSD(3/3/2)", 24.0),
            ("E-LGSD(3/4/3)", 35.0),
            ("E-LGSD(4/3/2)", 32.0),
            ("E-LGSD(4/4/3)", 46.0),
        ],
        Modulation::Qpsk => &[("JML", 100.0)],
    };
    table.iter().find(|(l, _)| *l == label).map(|(_, p)| *p)
}

/// Detector labels in first-seen order.
pub fn detector_labels(records: &[BerRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in records {
        if !out.contains(&r.detector) {
            out.push(r.detector.clone());
        }
    }
    out
}

/// `(snr, ber)` of `detector` on `satellite`, in record order.
pub fn curve(records: &[BerRecord], detector: &str, satellite: usize) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.detector == detector && r.satellite == satellite)
        .map(|r| (r.snr_db, r.ber))
        .collect()
}

/// SNR at which a BER curve first falls through `target`, interpolated
/// linearly in `log10(ber)` (linearly in BER when the lower point is zero).
pub fn snr_at_ber(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if !(b0 >= target && b1 < target) {
            return None;
        }
        let t = if b1 > 0.0 {
            (b0.log10() - target.log10()) / (b0.log10() - b1.log10())
        } else {
            (b0 - target) / (b0 - b1)
        };
        Some(s0 + t * (s1 - s0))
    })
}

/// BER of `satellite` per detector (columns) and SNR (rows), followed by
/// the SNR each detector needs for a BER of `1e-2`.
pub fn ber_table(records: &[BerRecord], satellite: usize) -> String {
    let labels = detector_labels(records);
    let mut snrs: Vec<f64> = Vec::new();
    for r in records {
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "BER of satellite {satellite}");
    let _ = write!(s, "{:>8}", "SNR dB");
    for l in &labels {
        let _ = write!(s, "  {l:>14}");
    }
    s.push('\n');
    for snr in &snrs {
        let _ = write!(s, "{snr:>8.2}");
        for l in &labels {
            let cell = records
                .iter()
                .find(|r| &r.detector == l && r.satellite == satellite && r.snr_db == *snr)
                .map_or_else(|| "-".to_string(), |r| format!("{:.3e}", r.ber));
            let _ = write!(s, "  {cell:>14}");
        }
        s.push('\n');
    }
    let _ = write!(s, "{:>8}", "@1e-2");
    for l in &labels {
        let cell =
            snr_at_ber(&curve(records, l, satellite), 1e-2).map_or_else(|| "-".to_string(), |x| format!("{x:.2} dB"));
        let _ = write!(s, "  {cell:>14}");
    }
    s.push('\n');
    s
}

/// Mean squarings per detected vector for each detector, averaged over
/// every SNR point with the number of vectors as weight.
pub fn mean_squarings(records: &[BerRecord]) -> Vec<(String, f64)> {
    detector_labels(records)
        .into_iter()
        .map(|l| {
            // Every satellite of a point carries the same count; use one.
            let (num, den) = records
                .iter()
                .filter(|r| r.detector == l && r.satellite == 0)
                .fold((0.0, 0.0), |(n, d), r| {
                    (n + r.mean_squarings * r.bits as f64, d + r.bits as f64)
                });
            (l, if den > 0.0 { num / den } else { 0.0 })
        })
        .collect()
}

/// Complexity table: measured squarings as a share of the exhaustive
/// closed form, next to the published share where one exists.
pub fn complexity_table(modulation: Modulation, jml_closed_form: u64, measured: &[(String, f64)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "JML closed form 2N|w|^N = {jml_closed_form} squarings");
    let _ = writeln!(
        s,
        "{:<16} {:>16} {:>10} {:>8}",
        "detector", "mean squarings", "% of JML", "ref %"
    );
    for (label, m) in measured {
        let pct = 100.0 * m / jml_closed_form as f64;
        let reference = reference_percent(modulation, label).map_or_else(|| "-".to_string(), |p| format!("{p:.0}%"));
        let _ = writeln!(s, "{label:<16} {m:>16.4e} {pct:>9.1}% {reference:>8}");
    }
    s
}
