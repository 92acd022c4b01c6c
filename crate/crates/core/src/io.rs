//! File formats.
//!
//! * Field CSV: optional `#` comment lines, a `modes,lambda,time,real` header
//!   with one data row, then `n,re,im` with one row per stored mode.
//! * Field binary: `QMKF`, version, `M`, `lambda`, `time`, real flag, then the
//!   coefficients as little-endian `f64` pairs.
//! * Trajectory binary: `QMKT`, version, grid, equation coefficients, symbol,
//!   `dt`, flow tag, gauge flag, then per snapshot `time`, `phase` (NaN when
//!   unknown) and coefficients, then the monitor records.
//! * Trajectory text: the same content as `key=value` header plus one
//!   `snapshot,time,phase` line and `n,re,im` block per snapshot.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::dynamics::{EquationCoefficients, LinearSymbol, RhsMode};
use crate::integrator::{Flow, MonitorRecord, Snapshot, Trajectory};
use crate::{Error, FrequencyGrid, Result, SpectralField};

const FIELD_MAGIC: &[u8; 4] = b"QMKF";
const TRAJ_MAGIC: &[u8; 4] = b"QMKT";
const VERSION: u32 = 1;

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| fmt_err(format!("bad number {s:?}")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        other => Err(fmt_err(format!("bad flag {other:?}"))),
    }
}

fn write_modes<W: Write>(w: &mut W, field: &SpectralField) -> Result<()> {
    writeln!(w, "n,re,im")?;
    let g = field.grid();
    for (i, c) in field.coeffs().iter().enumerate() {
        writeln!(w, "{},{},{}", g.frequency(g.index_at(i)), c.re, c.im)?;
    }
    Ok(())
}

fn read_modes(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    grid: FrequencyGrid,
    real: bool,
) -> Result<SpectralField> {
    let head = next_line(lines)?;
    if head.trim() != "n,re,im" {
        return Err(fmt_err(format!("expected mode header, got {head:?}")));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for _ in 0..grid.len() {
        let line = next_line(lines)?;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(fmt_err(format!("bad mode line {line:?}")));
        }
        let m = (parse_f64(cols[0])? * grid.period_scale()).round() as i64;
        let slot = grid
            .slot(m)
            .ok_or_else(|| fmt_err(format!("mode {} outside grid", cols[0])))?;
        coeffs[slot] = Complex64::new(parse_f64(cols[1])?, parse_f64(cols[2])?);
    }
    SpectralField::from_coeffs(grid, coeffs, real)
}

fn next_line(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<String> {
    loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if line.starts_with('#') || line.trim().is_empty() {
                    continue;
                }
                return Ok(line);
            }
            None => return Err(fmt_err("unexpected end of file")),
        }
    }
}

/// Writes a field snapshot as CSV; `comments` become leading `#` lines.
pub fn write_field_csv<W: Write>(
    w: &mut W,
    field: &SpectralField,
    time: f64,
    comments: &[String],
) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let g = field.grid();
    writeln!(w, "modes,lambda,time,real")?;
    writeln!(
        w,
        "{},{},{},{}",
        g.num_modes(),
        g.period_scale(),
        time,
        u8::from(field.is_real())
    )?;
    write_modes(w, field)
}

/// Reads a CSV field snapshot, returning it with its time.
pub fn read_field_csv<R: BufRead>(r: R) -> Result<(SpectralField, f64)> {
    let mut lines = r.lines();
    let head = next_line(&mut lines)?;
    if head.trim() != "modes,lambda,time,real" {
        return Err(fmt_err(format!("expected field header, got {head:?}")));
    }
    let row = next_line(&mut lines)?;
    let cols: Vec<&str> = row.split(',').collect();
    if cols.len() != 4 {
        return Err(fmt_err(format!("bad field header row {row:?}")));
    }
    let modes: usize = cols[0]
        .trim()
        .parse()
        .map_err(|_| fmt_err(format!("bad mode count {:?}", cols[0])))?;
    let grid = FrequencyGrid::new(modes, parse_f64(cols[1])?)?;
    let time = parse_f64(cols[2])?;
    let real = parse_bool(cols[3])?;
    Ok((read_modes(&mut lines, grid, real)?, time))
}

struct Out<W: Write>(W);

impl<W: Write> Out<W> {
    fn f64(&mut self, v: f64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u8(&mut self, v: u8) -> Result<()> {
        Ok(self.0.write_all(&[v])?)
    }
    fn coeffs(&mut self, f: &SpectralField) -> Result<()> {
        for c in f.coeffs() {
            self.f64(c.re)?;
            self.f64(c.im)?;
        }
        Ok(())
    }
}

struct In<R: Read>(R);

impl<R: Read> In<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0
            .read_exact(&mut b)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::UnexpectedEof => fmt_err("truncated file"),
                _ => Error::Io(e),
            })?;
        Ok(b)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let m: [u8; 4] = self.bytes()?;
        if &m != expected {
            return Err(fmt_err(format!("bad magic {m:?}")));
        }
        let v = self.u32()?;
        if v != VERSION {
            return Err(fmt_err(format!("unsupported version {v}")));
        }
        Ok(())
    }
    fn grid(&mut self) -> Result<FrequencyGrid> {
        let modes = usize::try_from(self.u64()?).map_err(|_| fmt_err("mode count too large"))?;
        FrequencyGrid::new(modes, self.f64()?)
    }
    fn coeffs(&mut self, grid: FrequencyGrid, real: bool) -> Result<SpectralField> {
        let coeffs = (0..grid.len())
            .map(|_| Ok(Complex64::new(self.f64()?, self.f64()?)))
            .collect::<Result<Vec<_>>>()?;
        SpectralField::from_coeffs(grid, coeffs, real)
    }
}

pub fn write_field_binary<W: Write>(w: W, field: &SpectralField, time: f64) -> Result<()> {
    let mut o = Out(w);
    o.0.write_all(FIELD_MAGIC)?;
    o.u32(VERSION)?;
    o.u64(field.grid().num_modes() as u64)?;
    o.f64(field.grid().period_scale())?;
    o.f64(time)?;
    o.u8(u8::from(field.is_real()))?;
    o.coeffs(field)?;
    Ok(o.0.flush()?)
}

pub fn read_field_binary<R: Read>(r: R) -> Result<(SpectralField, f64)> {
    let mut i = In(r);
    i.magic(FIELD_MAGIC)?;
    let grid = i.grid()?;
    let time = i.f64()?;
    let real = i.u8()? != 0;
    Ok((i.coeffs(grid, real)?, time))
}

/// Reads a field file, choosing the format from its first bytes.
pub fn read_field_file(path: &Path) -> Result<(SpectralField, f64)> {
    let mut r = BufReader::new(File::open(path)?);
    if r.fill_buf()?.starts_with(FIELD_MAGIC) {
        read_field_binary(r)
    } else {
        read_field_csv(r)
    }
}

fn flow_tag(flow: Flow) -> u8 {
    match flow {
        Flow::Physical(_) => 0,
        Flow::Renormalized(RhsMode::DirectSum) => 1,
        Flow::Renormalized(RhsMode::FftInclExcl) => 2,
    }
}

fn flow_from_tag(tag: u8, coeffs: EquationCoefficients) -> Result<Flow> {
    Ok(match tag {
        0 => Flow::Physical(coeffs),
        1 => Flow::Renormalized(RhsMode::DirectSum),
        2 => Flow::Renormalized(RhsMode::FftInclExcl),
        other => return Err(fmt_err(format!("unknown flow tag {other}"))),
    })
}

pub fn write_trajectory_binary<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut o = Out(w);
    o.0.write_all(TRAJ_MAGIC)?;
    o.u32(VERSION)?;
    o.u64(traj.grid().num_modes() as u64)?;
    o.f64(traj.grid().period_scale())?;
    for a in traj.coeffs().as_array() {
        o.f64(a)?;
    }
    let sym = traj.symbol();
    for v in [sym.c1, sym.c2, sym.c3, sym.epsilon, traj.dt()] {
        o.f64(v)?;
    }
    o.u8(flow_tag(traj.flow()))?;
    o.u8(u8::from(traj.is_gauged()))?;
    o.u64(traj.len() as u64)?;
    for snap in traj.snapshots() {
        o.f64(snap.time)?;
        o.f64(snap.phase.unwrap_or(f64::NAN))?;
        o.coeffs(&snap.field)?;
    }
    o.u64(traj.monitors().len() as u64)?;
    for m in traj.monitors() {
        for v in monitor_values(m) {
            o.f64(v)?;
        }
    }
    Ok(o.0.flush()?)
}

fn monitor_values(m: &MonitorRecord) -> [f64; 6] {
    [
        m.time,
        m.gamma1_drift,
        m.gamma2_drift,
        m.ham3_drift,
        m.hs_norm,
        m.phase,
    ]
}

fn monitor_from(v: [f64; 6]) -> MonitorRecord {
    MonitorRecord {
        time: v[0],
        gamma1_drift: v[1],
        gamma2_drift: v[2],
        ham3_drift: v[3],
        hs_norm: v[4],
        phase: v[5],
    }
}

fn phase_opt(p: f64) -> Option<f64> {
    if p.is_nan() {
        None
    } else {
        Some(p)
    }
}

pub fn read_trajectory_binary<R: Read>(r: R) -> Result<Trajectory> {
    let mut i = In(r);
    i.magic(TRAJ_MAGIC)?;
    let grid = i.grid()?;
    let coeffs = EquationCoefficients::new(i.f64()?, i.f64()?, i.f64()?, i.f64()?);
    let symbol = LinearSymbol {
        c1: i.f64()?,
        c2: i.f64()?,
        c3: i.f64()?,
        epsilon: i.f64()?,
    };
    let dt = i.f64()?;
    let flow = flow_from_tag(i.u8()?, coeffs)?;
    let gauged = i.u8()? != 0;
    let mut traj = Trajectory::new(grid, coeffs, symbol, flow, dt);
    traj.set_gauged(gauged);
    let count = i.u64()?;
    for _ in 0..count {
        let time = i.f64()?;
        let phase = phase_opt(i.f64()?);
        let field = i.coeffs(grid, true)?;
        traj.push(Snapshot { time, phase, field })?;
    }
    let monitors = i.u64()?;
    for _ in 0..monitors {
        let mut v = [0.0; 6];
        for x in &mut v {
            *x = i.f64()?;
        }
        traj.push_monitor(monitor_from(v));
    }
    Ok(traj)
}

pub fn write_trajectory_text<W: Write>(w: &mut W, traj: &Trajectory) -> Result<()> {
    let g = traj.grid();
    let [a1, a2, a3, a4] = traj.coeffs().as_array();
    let sym = traj.symbol();
    writeln!(w, "# qmkdv trajectory")?;
    writeln!(
        w,
        "modes={} lambda={} coeffs={},{},{},{} c1={} c2={} c3={} eps={} dt={} flow={} gauged={} snapshots={}",
        g.num_modes(),
        g.period_scale(),
        a1,
        a2,
        a3,
        a4,
        sym.c1,
        sym.c2,
        sym.c3,
        sym.epsilon,
        traj.dt(),
        flow_tag(traj.flow()),
        u8::from(traj.is_gauged()),
        traj.len()
    )?;
    for snap in traj.snapshots() {
        writeln!(w, "snapshot,{},{}", snap.time, snap.phase.unwrap_or(f64::NAN))?;
        write_modes(w, &snap.field)?;
    }
    Ok(())
}

pub fn read_trajectory_text<R: BufRead>(r: R) -> Result<Trajectory> {
    let mut lines = r.lines();
    let header = next_line(&mut lines)?;
    let mut kv = std::collections::HashMap::new();
    for tok in header.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| fmt_err(format!("bad header token {tok:?}")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| fmt_err(format!("missing header key {k}")))
    };
    let modes: usize = get("modes")?
        .parse()
        .map_err(|_| fmt_err("bad mode count"))?;
    let grid = FrequencyGrid::new(modes, parse_f64(get("lambda")?)?)?;
    let coeffs: EquationCoefficients = get("coeffs")?.parse()?;
    let symbol = LinearSymbol {
        c1: parse_f64(get("c1")?)?,
        c2: parse_f64(get("c2")?)?,
        c3: parse_f64(get("c3")?)?,
        epsilon: parse_f64(get("eps")?)?,
    };
    let tag: u8 = get("flow")?.parse().map_err(|_| fmt_err("bad flow tag"))?;
    let flow = flow_from_tag(tag, coeffs)?;
    let count: usize = get("snapshots")?
        .parse()
        .map_err(|_| fmt_err("bad snapshot count"))?;
    let mut traj = Trajectory::new(grid, coeffs, symbol, flow, parse_f64(get("dt")?)?);
    traj.set_gauged(parse_bool(get("gauged")?)?);
    for _ in 0..count {
        let line = next_line(&mut lines)?;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 || cols[0] != "snapshot" {
            return Err(fmt_err(format!("bad snapshot line {line:?}")));
        }
        let time = parse_f64(cols[1])?;
        let phase = phase_opt(parse_f64(cols[2])?);
        let field = read_modes(&mut lines, grid, true)?;
        traj.push(Snapshot { time, phase, field })?;
    }
    Ok(traj)
}

pub fn save_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "txt" || e == "csv") {
        write_trajectory_text(&mut w, traj)?;
        Ok(w.flush()?)
    } else {
        write_trajectory_binary(w, traj)
    }
}

/// Reads a trajectory file, choosing the format from its first bytes.
pub fn load_trajectory(path: &Path) -> Result<Trajectory> {
    let mut r = BufReader::new(File::open(path)?);
    if r.fill_buf()?.starts_with(TRAJ_MAGIC) {
        read_trajectory_binary(r)
    } else {
        read_trajectory_text(r)
    }
}

pub fn write_monitor_csv<W: Write>(
    w: &mut W,
    monitors: &[MonitorRecord],
    comments: &[String],
) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(
        w,
        "time,gamma1_rel_drift,gamma2_rel_drift,ham3_rel_drift,hs_norm,phase_integral"
    )?;
    for m in monitors {
        let v = monitor_values(m);
        writeln!(w, "{},{},{},{},{},{}", v[0], v[1], v[2], v[3], v[4], v[5])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, seeded};

    #[test]
    fn field_csv_roundtrip() {
        let g = FrequencyGrid::new(16, 2.0).unwrap();
        let f = random_field(&mut seeded(3), g, 7, 1.0, 0.4);
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f, 0.25, &["seed=3".into()]).unwrap();
        let (back, t) = read_field_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert_eq!(t, 0.25);
    }

    #[test]
    fn field_binary_roundtrip() {
        let g = FrequencyGrid::unit(32).unwrap();
        let f = random_field(&mut seeded(5), g, 15, 1.0, 0.4);
        let mut buf = Vec::new();
        write_field_binary(&mut buf, &f, 1.5).unwrap();
        assert_eq!(read_field_binary(buf.as_slice()).unwrap(), (f, 1.5));
        assert!(matches!(
            read_field_binary(&buf[..buf.len() - 3]),
            Err(Error::Format(_))
        ));
        buf[0] = b'X';
        assert!(matches!(read_field_binary(buf.as_slice()), Err(Error::Format(_))));
    }

    fn sample_trajectory() -> Trajectory {
        let g = FrequencyGrid::unit(16).unwrap();
        let coeffs = EquationCoefficients::INTEGRABLE;
        let mut traj = Trajectory::new(
            g,
            coeffs,
            LinearSymbol::bare(1.0),
            Flow::Physical(coeffs),
            1e-3,
        );
        let mut rng = seeded(9);
        for i in 0..3 {
            traj.push(Snapshot {
                time: i as f64 * 0.1,
                phase: if i == 1 { None } else { Some(i as f64) },
                field: random_field(&mut rng, g, 7, 1.0, 0.2),
            })
            .unwrap();
        }
        traj.push_monitor(monitor_from([0.0, 1e-12, 2e-12, 3e-12, 0.5, 0.0]));
        traj
    }

    #[test]
    fn trajectory_binary_roundtrip() {
        let traj = sample_trajectory();
        let mut buf = Vec::new();
        write_trajectory_binary(&mut buf, &traj).unwrap();
        assert_eq!(read_trajectory_binary(buf.as_slice()).unwrap(), traj);
    }

    #[test]
    fn trajectory_text_roundtrip() {
        let traj = sample_trajectory();
        let mut buf = Vec::new();
        write_trajectory_text(&mut buf, &traj).unwrap();
        let back = read_trajectory_text(buf.as_slice()).unwrap();
        assert_eq!(back.snapshots(), traj.snapshots());
        assert_eq!(back.symbol(), traj.symbol());
        assert_eq!(back.flow(), traj.flow());
    }

    #[test]
    fn monitor_header() {
        let mut buf = Vec::new();
        write_monitor_csv(&mut buf, sample_trajectory().monitors(), &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,gamma1_rel_drift"));
        assert_eq!(text.lines().count(), 2);
    }
}
