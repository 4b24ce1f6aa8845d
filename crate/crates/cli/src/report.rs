use std::fmt::Write;

use stvsr_core::MetricReport;

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", ")
}

/// Table for reading, then `key = value` lines for scripts. Zero-error PSNR
/// prints as `inf`; numbers in the key/value section use shortest round-trip
/// formatting.
pub fn render(report: &MetricReport) -> String {
    let mut out = String::new();
    writeln!(out, "{:>6}  {:>10}  {:>8}", "frame", "psnr_db", "ssim").unwrap();
    for (i, (p, s)) in report.psnr_per_frame.iter().zip(&report.ssim_per_frame).enumerate() {
        writeln!(out, "{i:>6}  {p:>10.4}  {s:>8.5}").unwrap();
    }
    writeln!(out, "{:>6}  {:>10.4}  {:>8.5}", "mean", report.mean_psnr, report.mean_ssim).unwrap();
    out.push('\n');
    writeln!(out, "[metrics]").unwrap();
    writeln!(out, "color_space = {}", report.color_space.name()).unwrap();
    writeln!(out, "frames = {}", report.psnr_per_frame.len()).unwrap();
    writeln!(out, "mean_psnr_db = {}", report.mean_psnr).unwrap();
    writeln!(out, "mean_ssim = {}", report.mean_ssim).unwrap();
    if let Some(c) = report.charbonnier {
        writeln!(out, "charbonnier = {c}").unwrap();
    }
    writeln!(out, "per_frame_psnr_db = {}", join(&report.psnr_per_frame)).unwrap();
    writeln!(out, "per_frame_ssim = {}", join(&report.ssim_per_frame)).unwrap();
    out
}

/// Reads one `key = value` line back out of a rendered report.
pub fn lookup<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|line| {
        let (k, v) = line.split_once('=')?;
        (k.trim() == key).then(|| v.trim())
    })
}
