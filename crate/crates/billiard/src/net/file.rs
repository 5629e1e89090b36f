//! Model files (`QBN1`, little-endian).
//!
//! Layout: magic `QBN1`; header `{version u32, R u32, layer_count u32}`;
//! per-layer records `{kind u8 (0 = conv, 1 = dense), dims u32[4],
//! weights f32[...], biases f32[...]}`; trailing CRC32 of everything between
//! the magic and the checksum. Convolution dims are
//! `(filters, in_channels, k, k)` with weights in im2col order
//! `(k*k*in_channels, filters)`; dense dims are `(inputs, outputs, 0, 0)`.

use super::layers::Parameters;
use super::{ArchitectureSpec, NetworkParameters, NUM_CLASSES};
use crate::binio::{atomic_write, expect_magic, open_reader, short_file};
use crate::error::{Error, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"QBN1";
const VERSION: u32 = 1;
const KIND_CONV: u8 = 0;
const KIND_DENSE: u8 = 1;

fn write_layer(
    payload: &mut Vec<u8>,
    kind: u8,
    dims: [u32; 4],
    weights: &Array2<f32>,
    biases: &Array1<f32>,
) -> Result<()> {
    payload.write_u8(kind)?;
    for d in dims {
        payload.write_u32::<LittleEndian>(d)?;
    }
    for &v in weights.iter() {
        payload.write_f32::<LittleEndian>(v)?;
    }
    for &v in biases.iter() {
        payload.write_f32::<LittleEndian>(v)?;
    }
    Ok(())
}

/// Writes the model with a trailing payload checksum.
pub fn save_model(path: &Path, net: &NetworkParameters) -> Result<()> {
    let spec = &net.spec;
    net.params.check_shapes(spec)?;
    let mut payload: Vec<u8> = Vec::new();
    payload.write_u32::<LittleEndian>(VERSION)?;
    payload.write_u32::<LittleEndian>(spec.input_resolution as u32)?;
    payload.write_u32::<LittleEndian>(4)?;
    write_layer(
        &mut payload,
        KIND_CONV,
        [spec.conv1_filters as u32, 1, spec.conv1_kernel as u32, spec.conv1_kernel as u32],
        &net.params.conv1_w,
        &net.params.conv1_b,
    )?;
    write_layer(
        &mut payload,
        KIND_CONV,
        [
            spec.conv2_filters as u32,
            spec.conv1_filters as u32,
            spec.conv2_kernel as u32,
            spec.conv2_kernel as u32,
        ],
        &net.params.conv2_w,
        &net.params.conv2_b,
    )?;
    write_layer(
        &mut payload,
        KIND_DENSE,
        [spec.flat_dim() as u32, spec.dense1_width as u32, 0, 0],
        &net.params.dense1_w,
        &net.params.dense1_b,
    )?;
    write_layer(
        &mut payload,
        KIND_DENSE,
        [spec.dense1_width as u32, NUM_CLASSES as u32, 0, 0],
        &net.params.dense2_w,
        &net.params.dense2_b,
    )?;
    let crc = crc32fast::hash(&payload);
    atomic_write(path, |w| {
        w.write_all(MAGIC)?;
        w.write_all(&payload)?;
        w.write_u32::<LittleEndian>(crc)?;
        Ok(())
    })
}

struct RawLayer {
    dims: [u32; 4],
    weights: Vec<f32>,
    biases: Vec<f32>,
}

fn read_layer(r: &mut impl Read, what: &str) -> Result<(u8, [u32; 4])> {
    let kind = r.read_u8().map_err(|_| short_file(what))?;
    let mut dims = [0u32; 4];
    for d in &mut dims {
        *d = r.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
    }
    Ok((kind, dims))
}

/// Loads and checksum-verifies a model file.
pub fn load_model(path: &Path) -> Result<NetworkParameters> {
    let what = "model file";
    let mut r = open_reader(path)?;
    expect_magic(&mut r, MAGIC, what)?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if rest.len() < 4 {
        return Err(short_file(what));
    }
    let payload = &rest[..rest.len() - 4];
    let stored_crc = u32::from_le_bytes(rest[rest.len() - 4..].try_into().unwrap());
    if crc32fast::hash(payload) != stored_crc {
        return Err(Error::Format(format!("{what}: checksum mismatch")));
    }

    let mut c = std::io::Cursor::new(payload);
    let version = c.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
    if version != VERSION {
        return Err(Error::Format(format!("{what}: unsupported version {version}")));
    }
    let input = c.read_u32::<LittleEndian>().map_err(|_| short_file(what))? as usize;
    let layer_count = c.read_u32::<LittleEndian>().map_err(|_| short_file(what))?;
    if layer_count != 4 {
        return Err(Error::Format(format!(
            "{what}: expected 4 layers, found {layer_count}"
        )));
    }
    let mut layers = Vec::with_capacity(4);
    for i in 0..4 {
        let (kind, dims) = read_layer(&mut c, what)?;
        let (w_len, b_len) = match (i, kind) {
            (0 | 1, KIND_CONV) => {
                let (f, cin, k) = (dims[0] as usize, dims[1] as usize, dims[2] as usize);
                if dims[2] != dims[3] {
                    return Err(Error::Format(format!("{what}: non-square kernel")));
                }
                (k * k * cin * f, f)
            }
            (2 | 3, KIND_DENSE) => {
                let (n_in, n_out) = (dims[0] as usize, dims[1] as usize);
                (n_in * n_out, n_out)
            }
            _ => {
                return Err(Error::Format(format!(
                    "{what}: unexpected layer kind {kind} at position {i}"
                )))
            }
        };
        let mut weights = vec![0.0f32; w_len];
        c.read_f32_into::<LittleEndian>(&mut weights)
            .map_err(|_| short_file(what))?;
        let mut biases = vec![0.0f32; b_len];
        c.read_f32_into::<LittleEndian>(&mut biases)
            .map_err(|_| short_file(what))?;
        let _ = kind;
        layers.push(RawLayer {
            dims,
            weights,
            biases,
        });
    }
    if c.position() != payload.len() as u64 {
        return Err(Error::Format(format!("{what}: trailing bytes in payload")));
    }

    let spec = ArchitectureSpec {
        input_resolution: input,
        conv1_filters: layers[0].dims[0] as usize,
        conv1_kernel: layers[0].dims[2] as usize,
        conv2_filters: layers[1].dims[0] as usize,
        conv2_kernel: layers[1].dims[2] as usize,
        dense1_width: layers[2].dims[1] as usize,
    };
    spec.validate()
        .map_err(|e| Error::Format(format!("{what}: inconsistent topology: {e}")))?;
    if layers[1].dims[1] as usize != spec.conv1_filters
        || layers[2].dims[0] as usize != spec.flat_dim()
        || layers[3].dims[0] as usize != spec.dense1_width
        || layers[3].dims[1] as usize != NUM_CLASSES
    {
        return Err(Error::Format(format!("{what}: layer shapes do not chain")));
    }

    let to_matrix = |l: &RawLayer, rows: usize, cols: usize| -> Result<Array2<f32>> {
        Array2::from_shape_vec((rows, cols), l.weights.clone())
            .map_err(|_| Error::Format(format!("{what}: bad weight count")))
    };
    let params = Parameters {
        conv1_w: to_matrix(
            &layers[0],
            spec.conv1_kernel * spec.conv1_kernel,
            spec.conv1_filters,
        )?,
        conv1_b: Array1::from_vec(layers[0].biases.clone()),
        conv2_w: to_matrix(
            &layers[1],
            spec.conv2_kernel * spec.conv2_kernel * spec.conv1_filters,
            spec.conv2_filters,
        )?,
        conv2_b: Array1::from_vec(layers[1].biases.clone()),
        dense1_w: to_matrix(&layers[2], spec.flat_dim(), spec.dense1_width)?,
        dense1_b: Array1::from_vec(layers[2].biases.clone()),
        dense2_w: to_matrix(&layers[3], spec.dense1_width, NUM_CLASSES)?,
        dense2_b: Array1::from_vec(layers[3].biases.clone()),
    };
    let net = NetworkParameters { spec, params };
    net.params.check_shapes(&spec)?;
    Ok(net)
}
