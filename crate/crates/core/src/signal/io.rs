//! Signal file formats.
//!
//! CSV: a one-line header `N=<n>,dims=<1|2>` followed by one `re,im` pair
//! per sample, row-major for 2-D. Binary: a 16-byte header (magic
//! `DFEXSIG1`, little-endian `u32` N, `u32` dims) followed by interleaved
//! re/im little-endian `f64`s.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{Shape, Signal};

pub const BINARY_MAGIC: &[u8; 8] = b"DFEXSIG1";

pub fn write_csv<W: Write>(sig: &Signal, mut w: W) -> Result<()> {
    writeln!(w, "N={},dims={}", sig.shape().len(), sig.shape().dims())?;
    for v in sig.values() {
        writeln!(w, "{:?},{:?}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Signal> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty signal file".into()))??;
    let (n, dims) = parse_header(header.trim())?;
    let shape = Shape::from_dims(n, dims)?;
    let mut values = Vec::with_capacity(shape.elems());
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("expected re,im pair, got {line:?}")))?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad real part {re:?}")))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad imaginary part {im:?}")))?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != shape.elems() {
        return Err(Error::Format(format!(
            "header promises {} samples, file holds {}",
            shape.elems(),
            values.len()
        )));
    }
    Signal::new(shape, values)
}

fn parse_header(header: &str) -> Result<(usize, u8)> {
    let mut n = None;
    let mut dims = None;
    for part in header.split(',') {
        match part.trim().split_once('=') {
            Some(("N", v)) => n = v.trim().parse().ok(),
            Some(("dims", v)) => dims = v.trim().parse().ok(),
            _ => {}
        }
    }
    match (n, dims) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::Format(format!("bad signal header {header:?}"))),
    }
}

pub fn write_binary<W: Write>(sig: &Signal, mut w: W) -> Result<()> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(sig.shape().len() as u32).to_le_bytes())?;
    w.write_all(&(sig.shape().dims() as u32).to_le_bytes())?;
    for v in sig.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Signal> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Format("bad magic; not a signal file".into()));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let dims = u32::from_le_bytes(word);
    let shape = Shape::from_dims(n, dims as u8)?;
    let mut values = Vec::with_capacity(shape.elems());
    let mut pair = [0u8; 16];
    for _ in 0..shape.elems() {
        r.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    Signal::new(shape, values)
}

/// Writes CSV for a `.csv` extension, the binary format otherwise.
pub fn save(sig: &Signal, path: &Path) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    if is_csv(path) {
        write_csv(sig, f)
    } else {
        write_binary(sig, f)
    }
}

pub fn load(path: &Path) -> Result<Signal> {
    let f = BufReader::new(File::open(path)?);
    if is_csv(path) {
        read_csv(f)
    } else {
        read_binary(f)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().map(|e| e == "csv").unwrap_or(false)
}
