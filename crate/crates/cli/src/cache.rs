//! Tensor archives kept on disk between runs, keyed by chain length, coupling
//! and time.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use xychain::transfer_tensor::compute_transfer_tensor;
use xychain::{ChainSpec, TransferTensor};

/// File name for a key. Floats are encoded by their bit patterns so that two
/// times that print alike but differ never share an entry.
pub fn entry_name(spec: &ChainSpec, time: f64) -> String {
    format!("tensor_n{}_d{:016x}_t{:016x}.txt", spec.n_nodes, spec.coupling.to_bits(), time.to_bits())
}

fn read(path: &Path, spec: &ChainSpec, time: f64) -> Option<TransferTensor> {
    let file = fs::File::open(path).ok()?;
    let t = TransferTensor::read_archive(BufReader::new(file)).ok()?;
    (t.n_nodes == spec.n_nodes && t.coupling == spec.coupling && t.time == time).then_some(t)
}

fn write(dir: &Path, path: &Path, t: &TransferTensor) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        t.write_archive(&mut w).map_err(std::io::Error::other)?;
        w.flush()?;
    }
    fs::rename(tmp, path)
}

/// The tensor at `time`, from the cache when possible. Cache failures only
/// produce a warning.
pub fn tensor(spec: &ChainSpec, time: f64, dir: Option<&Path>) -> xychain::Result<TransferTensor> {
    let path: Option<PathBuf> = dir.map(|d| d.join(entry_name(spec, time)));
    if let Some(t) = path.as_deref().and_then(|p| read(p, spec, time)) {
        return Ok(t);
    }
    let t = compute_transfer_tensor(spec, time)?;
    if let (Some(dir), Some(path)) = (dir, path) {
        if let Err(e) = write(dir, &path, &t) {
            eprintln!("warning: could not cache tensor in {}: {e}", dir.display());
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_the_cache() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ChainSpec::new(5, 1.0).unwrap();
        let fresh = tensor(&spec, 2.25, Some(dir.path())).unwrap();
        let file = dir.path().join(entry_name(&spec, 2.25));
        assert!(file.exists());
        let cached = tensor(&spec, 2.25, Some(dir.path())).unwrap();
        assert_eq!(fresh, cached);
    }

    #[test]
    fn distinct_keys_for_close_times() {
        let spec = ChainSpec::new(5, 1.0).unwrap();
        assert_ne!(entry_name(&spec, 0.1 + 0.2), entry_name(&spec, 0.3));
    }

    #[test]
    fn corrupt_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ChainSpec::new(4, 1.0).unwrap();
        fs::write(dir.path().join(entry_name(&spec, 1.0)), "garbage").unwrap();
        let t = tensor(&spec, 1.0, Some(dir.path())).unwrap();
        assert_eq!(t, compute_transfer_tensor(&spec, 1.0).unwrap());
    }
}
