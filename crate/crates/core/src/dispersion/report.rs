use std::fmt::Write as _;
use std::io::Write;

use super::gaps::BandGapReport;
use super::sweep::SweepResult;
use crate::error::Result;
use crate::output::fmt_num;

/// Branch samples as CSV: one metadata comment line, then
/// `k,branch_id,mode_class,kind,omega,v_phase,v_group`.
pub fn write_branches_csv(res: &SweepResult, header: &str, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{header}")?;
    writeln!(out, "k,branch_id,mode_class,kind,omega,v_phase,v_group")?;
    for j in 0..res.solves.len() {
        for b in &res.branches {
            let s = &b.samples[j];
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_num(s.k),
                b.id,
                b.mode_class,
                b.kind,
                fmt_num(s.omega),
                fmt_num(s.v_phase),
                fmt_num(s.v_group)
            )?;
        }
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_else(|| "absent".into())
}

/// Key = value summary of gaps, cutoffs, limits and branches.
pub fn gap_report_text(res: &SweepResult, gaps: &BandGapReport, header: &str) -> String {
    let c = &res.cutoffs;
    let mut s = String::new();
    let _ = writeln!(s, "{header}");
    let _ = writeln!(s, "[band_gaps]");
    if gaps.complete {
        for g in gaps.resolved() {
            let _ = writeln!(
                s,
                "gap = {} {} width {}",
                fmt_num(g.low),
                fmt_num(g.high),
                fmt_num(g.width())
            );
        }
    } else {
        let _ = writeln!(s, "no band gap");
    }
    for g in gaps.gaps.iter().filter(|g| !g.resolved) {
        let _ = writeln!(
            s,
            "below_resolution = {} {} width {}",
            fmt_num(g.low),
            fmt_num(g.high),
            fmt_num(g.width())
        );
    }
    let _ = writeln!(s, "[cutoffs]");
    let _ = writeln!(s, "omega_inf = {}", opt(c.omega_inf));
    let _ = writeln!(s, "omega_0 = {}", opt(c.omega0));
    let _ = writeln!(s, "omega_s = {}", opt(c.omega_s));
    let _ = writeln!(s, "omega_l = {}", opt(c.omega_l));
    let _ = writeln!(s, "gap_width_closed_form = {}", opt(c.gap_width()));
    let _ = writeln!(s, "beta_crit = {}", opt(c.beta_crit));
    let _ = writeln!(s, "[speeds]");
    let _ = writeln!(s, "C_l = {}", fmt_num(c.c_l));
    let _ = writeln!(s, "C_s = {}", fmt_num(c.c_s));
    let _ = writeln!(s, "c_inf = {}", fmt_num(c.c_inf));
    let _ = writeln!(s, "V_l = {}", opt(c.v_l));
    let _ = writeln!(s, "V_s = {}", opt(c.v_s));
    let _ = writeln!(s, "[branches]");
    for b in &res.branches {
        let _ = writeln!(
            s,
            "branch {} = {} {} multiplicity {} cutoff {} speed_limit {}{}",
            b.id,
            b.mode_class,
            b.kind,
            b.multiplicity,
            fmt_num(b.cutoff_estimate),
            fmt_num(b.speed_limit_estimate),
            if b.unresolved { " unresolved" } else { "" }
        );
    }
    s
}
