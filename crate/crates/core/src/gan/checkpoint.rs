//! Checkpoints: a flat little-endian f64 parameter file next to a JSON
//! sidecar describing the architecture and geometry.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::Mlp;
use crate::error::{Error, Result};
use crate::geometry::{GeometryTag, ManifoldPoint};

const MAGIC: &[u8; 4] = b"MWK1";

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub iter: usize,
    pub geometry: GeometryTag,
    pub anchor: ManifoldPoint,
    pub latent_dim: usize,
    pub generator: Mlp,
    pub critic: Mlp,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    iter: usize,
    geometry: GeometryTag,
    anchor: Vec<f64>,
    latent_dim: usize,
    generator_dims: Vec<usize>,
    critic_dims: Vec<usize>,
    hidden_slope: f64,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    os.into()
}

/// Write both files through temporaries, renamed only on success.
pub fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let meta = Sidecar {
        iter: cp.iter,
        geometry: cp.geometry,
        anchor: cp.anchor.ambient(),
        latent_dim: cp.latent_dim,
        generator_dims: cp.generator.layer_dims.clone(),
        critic_dims: cp.critic.layer_dims.clone(),
        hidden_slope: cp.generator.hidden_slope,
    };

    let mut payload = Vec::with_capacity(
        4 + 8 * (cp.generator.parameters().len() + cp.critic.parameters().len()),
    );
    payload.extend_from_slice(MAGIC);
    for v in cp.generator.flat().iter().chain(cp.critic.flat().iter()) {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &payload)?;
    let json = serde_json::to_vec_pretty(&meta)
        .map_err(|e| Error::Format(format!("sidecar encode: {e}")))?;
    write_atomic(&sidecar_path(path), &json)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let json = fs::read(sidecar_path(path))?;
    let meta: Sidecar = serde_json::from_slice(&json)
        .map_err(|e| Error::Format(format!("sidecar decode: {e}")))?;

    let bytes = fs::read(path)?;
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Format("bad checkpoint magic".into()));
    }
    let body = &bytes[4..];
    if body.len() % 8 != 0 {
        return Err(Error::Format("truncated checkpoint payload".into()));
    }
    let flat: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let gen_len = Mlp::flat_len(&meta.generator_dims);
    let critic_len = Mlp::flat_len(&meta.critic_dims);
    if flat.len() != gen_len + critic_len {
        return Err(Error::Format(format!(
            "checkpoint holds {} parameters, sidecar implies {}",
            flat.len(),
            gen_len + critic_len
        )));
    }
    let generator = Mlp::from_flat(&meta.generator_dims, meta.hidden_slope, &flat[..gen_len])?;
    let critic = Mlp::from_flat(&meta.critic_dims, meta.hidden_slope, &flat[gen_len..])?;
    let anchor = ManifoldPoint::from_ambient(meta.geometry, &meta.anchor)?;
    Ok(Checkpoint {
        iter: meta.iter,
        geometry: meta.geometry,
        anchor,
        latent_dim: meta.latent_dim,
        generator,
        critic,
    })
}

/// Write to a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile_in(d)?,
        None => tempfile_in(Path::new("."))?,
    };
    tmp.1.write_all(bytes)?;
    tmp.1.sync_all()?;
    drop(tmp.1);
    fs::rename(&tmp.0, path)?;
    Ok(())
}

fn tempfile_in(dir: &Path) -> Result<(std::path::PathBuf, fs::File)> {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.subsec_nanos())
        .unwrap_or(0);
    for attempt in 0..100u32 {
        let candidate = dir.join(format!(".tmp-{}-{}-{attempt}", std::process::id(), nanos));
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&candidate)
        {
            Ok(f) => return Ok((candidate, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(Error::Io(std::io::Error::new(
        std::io::ErrorKind::AlreadyExists,
        "could not create temp file",
    )))
}
