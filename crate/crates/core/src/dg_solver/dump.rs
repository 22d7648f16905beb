//! Binary trajectory files: little-endian `f64` throughout, a header
//! `[alpha, M, J, T]` followed by `U_0` and `U_1..U_J` (`M-1` values each).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{TimeGrid, Trajectory};
use crate::error::{argument, io_err, Error, Result};
use crate::fem1d::{FemFunction, SpaceGrid1D};
use crate::frac_kernel::FracOrder;

/// Writes `traj` to `out`; the trajectory must carry its full history.
pub fn write_to(traj: &Trajectory, out: &mut impl Write) -> std::io::Result<()> {
    let header = [traj.alpha.value(), traj.space.intervals() as f64, traj.time.steps() as f64, traj.time.final_time()];
    for v in header.iter().chain(&traj.u0h.coeffs).chain(traj.slabs_flat()) {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_dump(traj: &Trajectory, path: &Path) -> Result<()> {
    if !traj.has_full_history() {
        return Err(argument("only trajectories with full history can be dumped"));
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_to(traj, &mut w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn read_dump(path: &Path) -> Result<Trajectory> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(io_err(path))?;
    let bad = |reason: String| Error::Format { path: path.to_path_buf(), reason };
    if bytes.len() % 8 != 0 || bytes.len() < 32 {
        return Err(bad(format!("{} bytes is not a whole header plus f64 records", bytes.len())));
    }
    let vals: Vec<f64> =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight bytes"))).collect();
    let (alpha, m, j, t) = (vals[0], vals[1], vals[2], vals[3]);
    let as_count = |v: f64| -> Option<usize> { (v.fract() == 0.0 && v >= 1.0 && v < 1e12).then_some(v as usize) };
    let (m, j) = match (as_count(m), as_count(j)) {
        (Some(m), Some(j)) => (m, j),
        _ => return Err(bad(format!("header sizes M = {m}, J = {j} are not counts"))),
    };
    let alpha = FracOrder::new(alpha).map_err(|e| bad(e.to_string()))?;
    let space = SpaceGrid1D::new(m).map_err(|e| bad(e.to_string()))?;
    let time = TimeGrid::new(t, j).map_err(|e| bad(e.to_string()))?;
    let n = space.interior();
    let expected = 4 + n * (j + 1);
    if vals.len() != expected {
        return Err(bad(format!("expected {expected} values for M = {m}, J = {j}, found {}", vals.len())));
    }
    let u0h = FemFunction { coeffs: vals[4..4 + n].to_vec() };
    Trajectory::new(alpha, space, time, u0h, vals[4 + n..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg_solver::{run, ForcingSpec, SolverConfig};
    use crate::fem1d::SpatialFunctionSpec;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let s = SpaceGrid1D::new(8).unwrap();
        let t = TimeGrid::new(1.0, 4).unwrap();
        let f = ForcingSpec::Constant { x: SpatialFunctionSpec::power(-0.3) };
        let traj =
            run(SpatialFunctionSpec::power(0.5), &f, &s, &t, FracOrder::new(0.4).unwrap(), &SolverConfig::default())
                .unwrap();
        let path = dir.path().join("traj.bin");
        write_dump(&traj, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 8 * (4 + 7 * 5));
        let back = read_dump(&path).unwrap();
        assert_eq!(back, traj);
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_dump(&path), Err(Error::Format { .. })));
    }
}
