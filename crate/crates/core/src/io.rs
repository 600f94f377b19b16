//! Plain-text signal and folded-record files.
//!
//! Both formats start with `key=value` header lines followed by one sample per
//! line. Floats are written in shortest round-trip form, so a write/read cycle
//! is bit-exact.
//!
//! Signal file:
//! ```text
//! N=1024
//! OF=6
//! seed=7
//! 0.0123...
//! ```
//!
//! Folded record (the bit column is present only when `has_folding_bits=true`):
//! ```text
//! N=1024
//! lambda=0.25
//! bits=6            (or bits=unquantized)
//! has_folding_bits=true
//! -0.1171875,1
//! ```

use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modulo::FoldedRecord;
use crate::signal::SampledSignal;
use crate::Real;

pub fn write_signal<T: Real, W: Write>(mut w: W, signal: &SampledSignal<T>) -> Result<()> {
    writeln!(w, "N={}", signal.len())?;
    writeln!(w, "OF={}", signal.oversampling_factor)?;
    if let Some(seed) = signal.seed {
        writeln!(w, "seed={seed}")?;
    }
    for x in &signal.samples {
        writeln!(w, "{x}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_folded<T: Real, W: Write>(mut w: W, record: &FoldedRecord<T>) -> Result<()> {
    if let Some(flags) = &record.folding_bits {
        if flags.len() != record.len() {
            return Err(Error::LengthMismatch { expected: record.len(), actual: flags.len() });
        }
    }
    writeln!(w, "N={}", record.len())?;
    writeln!(w, "lambda={}", record.lambda)?;
    match record.bits {
        Some(b) => writeln!(w, "bits={b}")?,
        None => writeln!(w, "bits=unquantized")?,
    }
    writeln!(w, "has_folding_bits={}", record.folding_bits.is_some())?;
    match &record.folding_bits {
        Some(flags) => {
            for (x, b) in record.folded.iter().zip(flags) {
                writeln!(w, "{x},{}", u8::from(*b != 0))?;
            }
        }
        None => {
            for x in &record.folded {
                writeln!(w, "{x}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: std::iter::Enumerate<std::io::Lines<R>>,
    pending: Option<(usize, String)>,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self { inner: r.lines().enumerate(), pending: None }
    }

    /// Next non-blank line with its 1-based number.
    fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        if let Some(p) = self.pending.take() {
            return Ok(Some(p));
        }
        for (i, line) in self.inner.by_ref() {
            let line = line?;
            let t = line.trim();
            if !t.is_empty() {
                return Ok(Some((i + 1, t.to_string())));
            }
        }
        Ok(None)
    }

    /// Consumes `key=value` lines until the first sample line.
    fn header(&mut self) -> Result<Vec<(usize, String, String)>> {
        let mut out = Vec::new();
        while let Some((no, line)) = self.next_line()? {
            match line.split_once('=') {
                Some((k, v)) => out.push((no, k.trim().to_string(), v.trim().to_string())),
                None => {
                    self.pending = Some((no, line));
                    break;
                }
            }
        }
        Ok(out)
    }
}

fn parse<V: FromStr>(line: usize, what: &str, text: &str) -> Result<V> {
    text.parse()
        .map_err(|_| Error::Parse { line, reason: format!("invalid {what} `{text}`") })
}

fn lookup<'a>(header: &'a [(usize, String, String)], key: &str) -> Result<(usize, &'a str)> {
    header
        .iter()
        .find(|(_, k, _)| k == key)
        .map(|(no, _, v)| (*no, v.as_str()))
        .ok_or_else(|| Error::Parse { line: 0, reason: format!("missing header `{key}`") })
}

fn check_count(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Parse { line: 0, reason: format!("header says N={expected}, found {actual} samples") });
    }
    Ok(())
}

pub fn read_signal<T: Real, R: BufRead>(r: R) -> Result<SampledSignal<T>> {
    let mut lines = Lines::new(r);
    let header = lines.header()?;
    let (no, n) = lookup(&header, "N")?;
    let n: usize = parse(no, "N", n)?;
    let (no, of) = lookup(&header, "OF")?;
    let of: T = parse(no, "OF", of)?;
    let seed = match lookup(&header, "seed") {
        Ok((no, s)) => Some(parse::<u64>(no, "seed", s)?),
        Err(_) => None,
    };
    let mut samples = Vec::with_capacity(n);
    while let Some((no, line)) = lines.next_line()? {
        samples.push(parse::<T>(no, "sample", &line)?);
    }
    check_count(n, samples.len())?;
    let signal = SampledSignal::new(samples, of)?;
    Ok(match seed {
        Some(s) => signal.with_seed(s),
        None => signal,
    })
}

/// Reads a folded record. The residual is never stored, so it comes back as `None`.
pub fn read_folded<T: Real, R: BufRead>(r: R) -> Result<FoldedRecord<T>> {
    let mut lines = Lines::new(r);
    let header = lines.header()?;
    let (no, n) = lookup(&header, "N")?;
    let n: usize = parse(no, "N", n)?;
    let (no, lambda) = lookup(&header, "lambda")?;
    let lambda: T = parse(no, "lambda", lambda)?;
    let (no, bits) = lookup(&header, "bits")?;
    let bits = match bits {
        "unquantized" => None,
        b => Some(parse::<u32>(no, "bits", b)?),
    };
    let (no, flagged) = lookup(&header, "has_folding_bits")?;
    let flagged: bool = parse(no, "has_folding_bits", flagged)?;

    let mut folded = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(if flagged { n } else { 0 });
    while let Some((no, line)) = lines.next_line()? {
        if flagged {
            let (v, b) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: no,
                reason: "expected `<value>,<bit>`".into(),
            })?;
            folded.push(parse::<T>(no, "sample", v.trim())?);
            match b.trim() {
                "0" => flags.push(0),
                "1" => flags.push(1),
                other => return Err(Error::Parse { line: no, reason: format!("invalid bit `{other}`") }),
            }
        } else {
            folded.push(parse::<T>(no, "sample", &line)?);
        }
    }
    check_count(n, folded.len())?;
    Ok(FoldedRecord {
        folded,
        lambda,
        bits,
        folding_bits: flagged.then_some(flags),
        residual: None,
    })
}
