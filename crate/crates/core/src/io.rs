//! CSV output with headers and 17-significant-digit decimals.

use std::io::{self, Write};

use crate::exact::{ExactPmf, MomentTable};
use crate::stats::LilTrackerState;
use crate::walk::TrajectoryStat;

/// Formats like C's `%.17g`: enough digits to round-trip any `f64`,
/// positional notation for exponents in `-5..17`, trailing zeros removed.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };

    if (-5..17).contains(&exponent) {
        let body = if exponent < 0 {
            format!("0.{}{}", "0".repeat((-exponent - 1) as usize), digits)
        } else {
            let int_len = exponent as usize + 1;
            if digits.len() <= int_len {
                format!("{}{}", digits, "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = digits.split_at(1);
        let frac = if rest.is_empty() {
            String::new()
        } else {
            format!(".{rest}")
        };
        let esign = if exponent < 0 { '-' } else { '+' };
        format!("{sign}{lead}{frac}e{esign}{:02}", exponent.abs())
    }
}

fn write_row<W: Write>(out: &mut W, fields: &[String]) -> io::Result<()> {
    writeln!(out, "{}", fields.join(","))
}

pub fn write_pmf_csv<W: Write>(out: &mut W, pmf: &ExactPmf) -> io::Result<()> {
    writeln!(out, "index,value")?;
    for (h, m) in pmf.mass().iter().enumerate() {
        write_row(out, &[h.to_string(), fmt_g17(*m)])?;
    }
    Ok(())
}

/// Two pmfs side by side with their absolute difference.
pub fn write_pmf_comparison_csv<W: Write>(
    out: &mut W,
    dp: &ExactPmf,
    pgf: &ExactPmf,
) -> io::Result<()> {
    writeln!(out, "index,dp,pgf,abs_diff")?;
    let len = dp.mass().len().max(pgf.mass().len());
    for h in 0..len as u64 {
        let (a, b) = (dp.prob(h), pgf.prob(h));
        write_row(
            out,
            &[
                h.to_string(),
                fmt_g17(a),
                fmt_g17(b),
                fmt_g17((a - b).abs()),
            ],
        )?;
    }
    Ok(())
}

pub fn write_moment_table_csv<W: Write>(out: &mut W, table: &MomentTable) -> io::Result<()> {
    writeln!(out, "index,factorial,raw")?;
    for k in 1..=table.k_max() {
        write_row(
            out,
            &[
                k.to_string(),
                fmt_g17(table.factorial_moment(k)),
                fmt_g17(table.raw_moment(k)),
            ],
        )?;
    }
    Ok(())
}

pub fn write_values_csv<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    writeln!(out, "index,value")?;
    for (i, v) in values.iter().enumerate() {
        write_row(out, &[i.to_string(), fmt_g17(*v)])?;
    }
    Ok(())
}

pub fn write_trajectories_csv<W: Write>(out: &mut W, stats: &[TrajectoryStat]) -> io::Result<()> {
    writeln!(out, "seed,trajectory,checkpoint,position,w_hat")?;
    for stat in stats {
        for (t, h) in stat.checkpoints.iter().zip(&stat.positions) {
            write_row(
                out,
                &[
                    stat.seed.to_string(),
                    stat.index.to_string(),
                    t.to_string(),
                    h.to_string(),
                    fmt_g17(stat.w_hat),
                ],
            )?;
        }
    }
    Ok(())
}

/// Histogram counts with the matching exact probabilities.
pub fn write_histogram_csv<W: Write>(
    out: &mut W,
    counts: &[u64],
    exact: &ExactPmf,
) -> io::Result<()> {
    writeln!(out, "index,count,frequency,exact")?;
    let total: u64 = counts.iter().sum();
    for (h, &c) in counts.iter().enumerate() {
        write_row(
            out,
            &[
                h.to_string(),
                c.to_string(),
                fmt_g17(c as f64 / total.max(1) as f64),
                fmt_g17(exact.prob(h as u64)),
            ],
        )?;
    }
    Ok(())
}

pub fn write_lil_csv<W: Write>(
    out: &mut W,
    seed: u64,
    trajectory: u64,
    state: &LilTrackerState,
) -> io::Result<()> {
    for i in 0..state.checkpoints.len() {
        write_row(
            out,
            &[
                seed.to_string(),
                trajectory.to_string(),
                state.checkpoints[i].to_string(),
                fmt_g17(state.deviations[i]),
                fmt_g17(state.running_max[i]),
                fmt_g17(state.running_min[i]),
            ],
        )?;
    }
    Ok(())
}

pub const LIL_CSV_HEADER: &str = "seed,trajectory,checkpoint,deviation,running_max,running_min";

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_like_percent_g17() {
        assert_eq!(fmt_g17(0.375), "0.375");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1.875), "1.875");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1234.0), "1234");
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(0.00012), "0.00012");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_g17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn pmf_csv() {
        let pmf = ExactPmf::from_mass(vec![0.0, 0.375, 0.375, 0.25]);
        let mut buf = Vec::new();
        write_pmf_csv(&mut buf, &pmf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,value\n0,0\n1,0.375\n2,0.375\n3,0.25\n"
        );
    }
}
