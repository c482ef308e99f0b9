//! Binary feature container and its JSON sidecar.
//!
//! Container layout (all integers little-endian): magic `DFEXFTR1`, `u32`
//! layer count, `u32` dims, then one block per layer: `u8` contributes flag
//! and, when set, `u32` per-dimension length, `u64` path count, and per path
//! the label list (`u32` length, then tagged labels) followed by the
//! interleaved re/im `f64` samples.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{AtomLabel, Direction};
use crate::signal::{Shape, Signal};

use super::{FeatureVector, Path};

pub const FEATURE_MAGIC: &[u8; 8] = b"DFEXFTR1";

/// JSON sidecar written next to the container: dimensions and norms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSidecar {
    pub dimension: usize,
    pub feature_norm: f64,
    pub layers: Vec<LayerSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer: usize,
    pub paths: usize,
    pub length: usize,
    pub norm: f64,
}

impl FeatureSidecar {
    pub fn describe(fv: &FeatureVector) -> Self {
        FeatureSidecar {
            dimension: fv.dimension(),
            feature_norm: fv.norm(),
            layers: fv
                .layers()
                .iter()
                .enumerate()
                .map(|(d, layer)| LayerSummary {
                    layer: d,
                    paths: layer.len(),
                    length: layer.values().next().map(|s| s.shape().len()).unwrap_or(0),
                    norm: fv.layer_norm(d),
                })
                .collect(),
        }
    }
}

pub fn write_features<W: Write>(fv: &FeatureVector, mut w: W) -> Result<()> {
    w.write_all(FEATURE_MAGIC)?;
    w.write_all(&(fv.layers().len() as u32).to_le_bytes())?;
    let dims = fv
        .layers()
        .iter()
        .flat_map(|l| l.values())
        .next()
        .map(|s| s.shape().dims())
        .unwrap_or(1);
    w.write_all(&(dims as u32).to_le_bytes())?;
    for layer in fv.layers() {
        if layer.is_empty() {
            w.write_all(&[0u8])?;
            continue;
        }
        w.write_all(&[1u8])?;
        let n = layer.values().next().unwrap().shape().len();
        w.write_all(&(n as u32).to_le_bytes())?;
        w.write_all(&(layer.len() as u64).to_le_bytes())?;
        for (path, sig) in layer {
            w.write_all(&(path.len() as u32).to_le_bytes())?;
            for label in &path.0 {
                write_label(label, &mut w)?;
            }
            for v in sig.values() {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_features<R: Read>(mut r: R) -> Result<FeatureVector> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FEATURE_MAGIC {
        return Err(Error::Format("bad magic; not a feature container".into()));
    }
    let layer_count = read_u32(&mut r)? as usize;
    let dims = read_u32(&mut r)? as u8;
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        if flag[0] == 0 {
            layers.push(BTreeMap::new());
            continue;
        }
        let n = read_u32(&mut r)? as usize;
        let shape = Shape::from_dims(n, dims)?;
        let path_count = read_u64(&mut r)? as usize;
        let mut layer = BTreeMap::new();
        for _ in 0..path_count {
            let path_len = read_u32(&mut r)? as usize;
            let mut labels = Vec::with_capacity(path_len);
            for _ in 0..path_len {
                labels.push(read_label(&mut r)?);
            }
            let mut values = Vec::with_capacity(shape.elems());
            let mut pair = [0u8; 16];
            for _ in 0..shape.elems() {
                r.read_exact(&mut pair)?;
                values.push(Complex64::new(
                    f64::from_le_bytes(pair[..8].try_into().unwrap()),
                    f64::from_le_bytes(pair[8..].try_into().unwrap()),
                ));
            }
            layer.insert(Path(labels), Signal::new(shape, values)?);
        }
        layers.push(layer);
    }
    Ok(FeatureVector::new(layers))
}

fn write_label<W: Write>(label: &AtomLabel, w: &mut W) -> Result<()> {
    match label {
        AtomLabel::Wavelet { scale, direction } => {
            w.write_all(&[0u8])?;
            w.write_all(&scale.to_le_bytes())?;
            w.write_all(&[direction_code(*direction)])?;
        }
        AtomLabel::Tag(tag) => {
            w.write_all(&[1u8])?;
            w.write_all(&(tag.len() as u32).to_le_bytes())?;
            w.write_all(tag.as_bytes())?;
        }
    }
    Ok(())
}

fn read_label<R: Read>(r: &mut R) -> Result<AtomLabel> {
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    match kind[0] {
        0 => {
            let scale = read_u32(r)?;
            let mut dir = [0u8; 1];
            r.read_exact(&mut dir)?;
            Ok(AtomLabel::Wavelet { scale, direction: direction_from_code(dir[0])? })
        }
        1 => {
            let len = read_u32(r)? as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)?;
            Ok(AtomLabel::Tag(String::from_utf8(bytes).map_err(|_| {
                Error::Format("atom tag is not valid UTF-8".into())
            })?))
        }
        k => Err(Error::Format(format!("unknown label kind {k}"))),
    }
}

fn direction_code(d: Direction) -> u8 {
    match d {
        Direction::None => 0,
        Direction::Horizontal => 1,
        Direction::Vertical => 2,
        Direction::Diagonal => 3,
    }
}

fn direction_from_code(c: u8) -> Result<Direction> {
    Ok(match c {
        0 => Direction::None,
        1 => Direction::Horizontal,
        2 => Direction::Vertical,
        3 => Direction::Diagonal,
        _ => return Err(Error::Format(format!("unknown direction code {c}"))),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
