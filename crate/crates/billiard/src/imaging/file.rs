//! Dataset files (`QBD1`, little-endian) and PGM image export.
//!
//! Layout: magic `QBD1`; header `{version u32, R u32, count u32, kind u8
//! (0 = wavefunction, 1 = density), split_seed u64}`; `count` records
//! `{label u8 (0 = integrable, 1 = non-integrable), inv_kappa f64,
//! state_index u32, pixels f32[R*R] row-major}`; footer `{train_len u32,
//! train u32[...], test_len u32, test u32[...]}`.

use super::{Dataset, GridKind, Label, LabeledImage, PixelGrid};
use crate::binio::{atomic_write, expect_magic, open_reader, short_file};
use crate::error::{Error, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use std::io::Write;
use std::path::Path;

const MAGIC: &[u8; 4] = b"QBD1";
const VERSION: u32 = 1;

fn kind_byte(kind: GridKind) -> u8 {
    match kind {
        GridKind::Wavefunction => 0,
        GridKind::Density => 1,
    }
}

fn kind_from_byte(b: u8) -> Result<GridKind> {
    match b {
        0 => Ok(GridKind::Wavefunction),
        1 => Ok(GridKind::Density),
        _ => Err(Error::Format(format!("invalid grid kind byte {b}"))),
    }
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::InvalidInput("refusing to write an empty dataset".into()));
    }
    let r = ds.resolution();
    let kind = ds.kind();
    if ds
        .records
        .iter()
        .any(|rec| rec.grid.resolution() != r || rec.grid.kind() != kind)
    {
        return Err(Error::ShapeMismatch(
            "dataset records differ in resolution or kind".into(),
        ));
    }
    atomic_write(path, |w| {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(r as u32)?;
        w.write_u32::<LittleEndian>(ds.len() as u32)?;
        w.write_u8(kind_byte(kind))?;
        w.write_u64::<LittleEndian>(ds.split_seed)?;
        for rec in &ds.records {
            w.write_u8(rec.label.class_index() as u8)?;
            w.write_f64::<LittleEndian>(rec.inv_kappa)?;
            w.write_u32::<LittleEndian>(rec.state_index)?;
            for &v in rec.grid.values().iter() {
                w.write_f32::<LittleEndian>(v as f32)?;
            }
        }
        w.write_u32::<LittleEndian>(ds.train.len() as u32)?;
        for &i in &ds.train {
            w.write_u32::<LittleEndian>(i)?;
        }
        w.write_u32::<LittleEndian>(ds.test.len() as u32)?;
        for &i in &ds.test {
            w.write_u32::<LittleEndian>(i)?;
        }
        Ok(())
    })
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let what = "dataset file";
    let mut rd = open_reader(path)?;
    expect_magic(&mut rd, MAGIC, what)?;
    let version = rd.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
    if version != VERSION {
        return Err(Error::Format(format!("{what}: unsupported version {version}")));
    }
    let r = rd.read_u32::<LittleEndian>().map_err(|_| short_file(what))? as usize;
    let count = rd.read_u32::<LittleEndian>().map_err(|_| short_file(what))? as usize;
    let kind = kind_from_byte(rd.read_u8().map_err(|_| short_file(what))?)?;
    let split_seed = rd.read_u64::<LittleEndian>().map_err(|_| short_file(what))?;
    if r < 2 {
        return Err(Error::Format(format!("{what}: invalid resolution {r}")));
    }

    let mut records = Vec::with_capacity(count);
    let mut pixels = vec![0.0f32; r * r];
    for _ in 0..count {
        let label = Label::from_class_index(rd.read_u8().map_err(|_| short_file(what))?)?;
        let inv_kappa = rd.read_f64::<LittleEndian>().map_err(|_| short_file(what))?;
        let state_index = rd.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
        rd.read_f32_into::<LittleEndian>(&mut pixels)
            .map_err(|_| short_file(what))?;
        let values = Array2::from_shape_vec((r, r), pixels.iter().map(|&v| v as f64).collect())
            .expect("square");
        // records were normalized when built; f32 storage keeps the sum
        // within the grid tolerance
        let grid = PixelGrid::from_parts(values, kind, true)?;
        records.push(LabeledImage {
            grid,
            label,
            inv_kappa,
            state_index,
        });
    }

    let read_list = |rd: &mut std::io::BufReader<std::fs::File>| -> Result<Vec<u32>> {
        let len = rd.read_u32::<LittleEndian>().map_err(|_| short_file(what))? as usize;
        let mut out = vec![0u32; len];
        rd.read_u32_into::<LittleEndian>(&mut out)
            .map_err(|_| short_file(what))?;
        Ok(out)
    };
    let train = read_list(&mut rd)?;
    let test = read_list(&mut rd)?;
    if train.len() + test.len() != count
        || train.iter().chain(&test).any(|&i| i as usize >= count)
    {
        return Err(Error::Format(format!("{what}: split is not a partition")));
    }
    Ok(Dataset {
        records,
        train,
        test,
        split_seed,
    })
}

/// 8-bit binary PGM (`P5`) export, values scaled to the full range.
pub fn write_pgm(path: &Path, grid: &PixelGrid) -> Result<()> {
    let r = grid.resolution();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in grid.values().iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    atomic_write(path, |w| {
        write!(w, "P5\n{r} {r}\n255\n")?;
        let mut row = Vec::with_capacity(r);
        for i in 0..r {
            row.clear();
            for j in 0..r {
                let v = (grid.values()[[i, j]] - lo) / span;
                row.push((v * 255.0).round() as u8);
            }
            w.write_all(&row)?;
        }
        Ok(())
    })
}
