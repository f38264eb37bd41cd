use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use rdx3_core::checker::{BoundCheck, Verdict};
use rdx3_core::pipeline::{CheckReport, ParamsReport};
use rdx3_core::rational;
use rdx3_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> rdx3_core::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::Falsified { .. } => "falsified",
        Verdict::Unknown => "unknown",
    }
}

fn row(out: &mut String, name: &str, v: &Verdict, constant: Option<String>) {
    let witness = v.witness().map(|w| format!("{:?}", w.point)).unwrap_or_default();
    out.push_str(&format!("{name},{},{},\"{witness}\"\n", verdict_name(v), constant.unwrap_or_default()));
}

fn bound_row(out: &mut String, name: &str, b: &BoundCheck) {
    row(out, name, &b.verdict, b.constant.as_ref().map(rational::format));
}

/// One row per condition: `condition,verdict,constant,witness`.
pub fn check_csv(r: &CheckReport) -> String {
    let c = &r.conditions;
    let mut out = String::from("condition,verdict,constant,witness\n");
    row(&mut out, "quasi_positive", &c.quasi_positive, None);
    bound_row(&mut out, "mass_control", &c.mass_control);
    for (k, b) in c.iwsc.rows.iter().enumerate() {
        bound_row(&mut out, &format!("iwsc_row{}", k + 1), b);
    }
    row(&mut out, "growth", &c.growth.verdict, Some(c.growth.m.to_string()));
    for (k, b) in c.isc.rows.iter().enumerate() {
        bound_row(&mut out, &format!("isc_row{}", k + 1), b);
    }
    out
}

/// `i,j,minor1,minor2,minor3,positive`.
pub fn minors_csv(r: &ParamsReport) -> String {
    let mut out = String::from("i,j,minor1,minor2,minor3,positive\n");
    for m in &r.minors_audit {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{}\n",
            m.i, m.j, m.minors[0], m.minors[1], m.minors[2], m.positive
        ));
    }
    out
}
