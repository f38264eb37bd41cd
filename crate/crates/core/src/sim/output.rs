use std::io::Write;

use super::{Flag, TrajectoryRecord};
use crate::error::Result;

pub const CSV_HEADER: &str = "t,linf_u,linf_v,linf_w,lp_sum,mass,energy,dt,flags";

fn flag_name(f: Flag) -> &'static str {
    match f {
        Flag::NegativeExcursion => "negative_excursion",
        Flag::DtRejected => "dt_rejected",
        Flag::DtUnderflow => "dt_underflow",
        Flag::BlowUpSuspected => "blowup_suspected",
    }
}

/// Fixed column order, 17 significant digits, flags joined by `|`.
pub fn write_csv<W: Write>(records: &[TrajectoryRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let nums = [r.t, r.linf[0], r.linf[1], r.linf[2], r.lp_sum, r.mass, r.energy, r.dt];
        for x in nums {
            write!(out, "{x:.16e},")?;
        }
        let flags: Vec<&str> = r.flags.iter().map(|f| flag_name(*f)).collect();
        writeln!(out, "{}", flags.join("|"))?;
    }
    Ok(())
}
