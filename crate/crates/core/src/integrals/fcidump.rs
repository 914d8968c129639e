//! FCIDUMP reader and writer.
//!
//! Header `&FCI NORB=..,NELEC=..,MS2=.., ORBSYM=..,ISYM=.. &END` (or `/`),
//! then `value p q r s` lines with 1-based chemist-notation indices:
//! `p q r s` is `(pq|rs)`, `p q 0 0` is `h_pq`, `0 0 0 0` is the core energy.
//! Orbital symmetry labels are accepted and ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::IntegralSet;
use crate::error::{Error, Result};

const DUPLICATE_TOLERANCE: f64 = 1e-10;

pub fn read_fcidump(path: &Path) -> Result<IntegralSet> {
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text, path)
}

pub fn write_fcidump(ints: &IntegralSet, path: &Path) -> Result<()> {
    std::fs::write(path, write_fcidump_string(ints))?;
    Ok(())
}

fn header_value(header: &str, key: &str) -> Option<String> {
    let upper = header.to_ascii_uppercase();
    let mut search = 0;
    while let Some(pos) = upper[search..].find(key) {
        let start = search + pos;
        let before_ok = start == 0 || !upper.as_bytes()[start - 1].is_ascii_alphanumeric();
        let rest = upper[start + key.len()..].trim_start();
        if before_ok && rest.starts_with('=') {
            let value: String = rest[1..]
                .trim_start()
                .chars()
                .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                .collect();
            return Some(value);
        }
        search = start + key.len();
    }
    None
}

/// `source` is used for error messages only.
pub fn parse_fcidump(text: &str, source: &Path) -> Result<IntegralSet> {
    let err = |line: usize, msg: String| Error::Fcidump {
        path: PathBuf::from(source),
        line,
        msg,
    };

    let mut header = String::new();
    let mut body_start = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        let upper = t.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END").or_else(|| (t == "/").then_some(0)) {
            header.push_str(&t[..pos]);
            body_start = Some(i + 1);
            break;
        }
        if let Some(pos) = upper
            .find('/')
            .filter(|_| upper.contains("&FCI") || !header.is_empty())
        {
            header.push_str(&t[..pos]);
            body_start = Some(i + 1);
            break;
        }
        header.push_str(t);
        header.push(' ');
    }
    let body_start = body_start.ok_or_else(|| err(1, "header is not terminated by &END".into()))?;
    if !header.to_ascii_uppercase().contains("&FCI") {
        return Err(err(1, "missing &FCI header".into()));
    }
    let get = |key: &str| -> Result<Option<i64>> {
        match header_value(&header, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<i64>()
                .map(Some)
                .map_err(|_| err(1, format!("bad {key} value `{v}`"))),
        }
    };
    let norb = get("NORB")?.ok_or_else(|| err(1, "missing NORB".into()))?;
    let nelec = get("NELEC")?.ok_or_else(|| err(1, "missing NELEC".into()))?;
    let ms2 = get("MS2")?.unwrap_or(0);
    if norb <= 0 || norb > 64 {
        return Err(err(1, format!("NORB={norb} outside 1..=64")));
    }
    if nelec < 0 || (nelec + ms2) % 2 != 0 || ms2.abs() > nelec {
        return Err(err(1, format!("inconsistent NELEC={nelec}, MS2={ms2}")));
    }
    let n = norb as usize;
    let n_alpha = ((nelec + ms2) / 2) as usize;
    let n_beta = ((nelec - ms2) / 2) as usize;
    if n_alpha > n || n_beta > n {
        return Err(err(
            1,
            format!("{nelec} electrons do not fit in {n} orbitals"),
        ));
    }

    let mut h: HashMap<(usize, usize), f64> = HashMap::new();
    let mut g: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    let mut e_core: Option<f64> = None;
    for (i, line) in text.lines().enumerate().skip(body_start) {
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(lineno, format!("expected `value p q r s`, got `{t}`")));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| err(lineno, format!("bad value `{}`", fields[0])))?;
        let mut idx = [0usize; 4];
        for k in 0..4 {
            let v: i64 = fields[k + 1]
                .parse()
                .map_err(|_| err(lineno, format!("bad index `{}`", fields[k + 1])))?;
            if v < 0 || v > norb {
                return Err(err(lineno, format!("index {v} out of range 0..={norb}")));
            }
            idx[k] = v as usize;
        }
        let check = |old: Option<f64>| -> Result<()> {
            match old {
                Some(o) if (o - value).abs() > DUPLICATE_TOLERANCE => Err(err(
                    lineno,
                    format!("conflicting duplicate entry: {o} vs {value}"),
                )),
                _ => Ok(()),
            }
        };
        match idx {
            [0, 0, 0, 0] => {
                check(e_core)?;
                e_core = Some(value);
            }
            [p, q, 0, 0] if p > 0 && q > 0 => {
                let key = (p.max(q) - 1, p.min(q) - 1);
                check(h.get(&key).copied())?;
                h.insert(key, value);
            }
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                let pq = (p.max(q) - 1, p.min(q) - 1);
                let rs = (r.max(s) - 1, r.min(s) - 1);
                let (a, b) = if pq >= rs { (pq, rs) } else { (rs, pq) };
                let key = (a.0, a.1, b.0, b.1);
                check(g.get(&key).copied())?;
                g.insert(key, value);
            }
            _ => {
                return Err(err(lineno, format!("invalid index pattern {idx:?}")));
            }
        }
    }

    let mut hm = vec![0.0; n * n];
    for (&(p, q), &v) in &h {
        hm[p * n + q] = v;
        hm[q * n + p] = v;
    }
    let mut gm = vec![0.0; n.pow(4)];
    let at = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for (&(p, q, r, s), &v) in &g {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            gm[at(a, b, c, d)] = v;
        }
    }
    IntegralSet::new(n, n_alpha, n_beta, e_core.unwrap_or(0.0), hm, gm)
}

/// Serializes the unique integrals (`p≥q`, `r≥s`, `pq≥rs`); zeros omitted.
/// Values use 17 significant digits so a read restores them bit-for-bit.
pub fn write_fcidump_string(ints: &IntegralSet) -> String {
    let n = ints.n_orb();
    let nelec = ints.n_alpha() + ints.n_beta();
    let ms2 = ints.n_alpha() as i64 - ints.n_beta() as i64;
    let mut out = String::new();
    writeln!(out, "&FCI NORB={n},NELEC={nelec},MS2={ms2},").unwrap();
    writeln!(out, "  ORBSYM={}", "1,".repeat(n)).unwrap();
    writeln!(out, "  ISYM=1,").unwrap();
    writeln!(out, "&END").unwrap();
    for p in 0..n {
        for q in 0..=p {
            for r in 0..=p {
                let smax = if r == p { q } else { r };
                for s in 0..=smax {
                    let v = ints.g(p, q, r, s);
                    if v != 0.0 {
                        writeln!(
                            out,
                            "{v:>25.16e} {:>3} {:>3} {:>3} {:>3}",
                            p + 1,
                            q + 1,
                            r + 1,
                            s + 1
                        )
                        .unwrap();
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h(p, q);
            if v != 0.0 {
                writeln!(
                    out,
                    "{v:>25.16e} {:>3} {:>3} {:>3} {:>3}",
                    p + 1,
                    q + 1,
                    0,
                    0
                )
                .unwrap();
            }
        }
    }
    writeln!(
        out,
        "{:>25.16e} {:>3} {:>3} {:>3} {:>3}",
        ints.e_core(),
        0,
        0,
        0,
        0
    )
    .unwrap();
    out
}
