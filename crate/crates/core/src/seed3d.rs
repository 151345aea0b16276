//! Ingestion of externally sampled 3D incompressible seed fields.
//!
//! A seed file carries `U`, its nine gradient components, `P`, `grad P` and
//! the metadata `p_inf` / `support_radius` on a uniform structured grid,
//! either as CSV with a comment header or as legacy-VTK `STRUCTURED_POINTS`
//! with `FIELD` arrays. The returned evaluator interpolates trilinearly and
//! reports the far-field constants exactly outside the grid box.
//!
//! Ingested seeds are flagged as unverified upstream: orthogonality and
//! incompressibility are measured and reported, but hold only to whatever
//! accuracy the file was sampled at.

use std::fs;
use std::path::Path;

use crate::{BaseFlow, Error, Real, Result};

/// Quality measurements taken on the raw grid data at ingestion time.
#[derive(Clone, Copy, Debug)]
pub struct SeedQuality<T> {
    /// Max of `|tr grad U|` over grid nodes.
    pub max_divergence: T,
    /// Max of `|U . grad P|` over grid nodes, normalised by `max(|U||gradP|, 1)`.
    pub max_orthogonality: T,
}

/// Trilinearly interpolated 3D base solution read from file.
pub struct SeedField3<T: Real> {
    origin: [T; 3],
    spacing: T,
    dims: [usize; 3],
    u: Vec<[T; 3]>,
    grad_u: Vec<[[T; 3]; 3]>,
    p: Vec<T>,
    grad_p: Vec<[T; 3]>,
    p_inf: T,
    p_min: T,
    support_radius: T,
    quality: SeedQuality<T>,
}

/// Read a seed field from `path` (CSV or legacy VTK, detected by content).
pub fn ingest_seed3d<T: Real>(path: &Path) -> Result<SeedField3<T>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Ingest(format!("cannot read {}: {e}", path.display())))?;
    let raw = if text.trim_start().starts_with("# vtk") {
        parse_vtk(&text)?
    } else {
        parse_csv(&text)?
    };
    SeedField3::from_raw(raw)
}

struct RawSeed {
    origin: [f64; 3],
    spacing: f64,
    dims: [usize; 3],
    u: Vec<[f64; 3]>,
    grad_u: Vec<[[f64; 3]; 3]>,
    p: Vec<f64>,
    grad_p: Vec<[f64; 3]>,
    p_inf: f64,
    support_radius: f64,
}

const CSV_HEADER: &str = "x,y,z,Ux,Uy,Uz,dUxdx,dUxdy,dUxdz,dUydx,dUydy,dUydz,dUzdx,dUzdy,dUzdz,P,dPdx,dPdy,dPdz";

fn parse_csv(text: &str) -> Result<RawSeed> {
    let mut p_inf = None;
    let mut support_radius = None;
    let mut origin = None;
    let mut spacing = None;
    let mut dims = None;
    let mut header_seen = false;
    let mut rows: Vec<Vec<f64>> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let (key, value) = meta
                .split_once('=')
                .ok_or_else(|| Error::Ingest(format!("malformed metadata line {}", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let parse_f = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::Ingest(format!("bad numeric value for {key}: {v}")))
            };
            match key {
                "p_inf" => p_inf = Some(parse_f(value)?),
                "support_radius" => support_radius = Some(parse_f(value)?),
                "spacing" => spacing = Some(parse_f(value)?),
                "origin" => {
                    let parts: Vec<f64> = value
                        .split(',')
                        .map(|v| parse_f(v.trim()))
                        .collect::<Result<_>>()?;
                    if parts.len() != 3 {
                        return Err(Error::Ingest("origin needs three components".into()));
                    }
                    origin = Some([parts[0], parts[1], parts[2]]);
                }
                "dims" => {
                    let parts: Vec<usize> = value
                        .split(',')
                        .map(|v| {
                            v.trim()
                                .parse::<usize>()
                                .map_err(|_| Error::Ingest(format!("bad dims value: {v}")))
                        })
                        .collect::<Result<_>>()?;
                    if parts.len() != 3 {
                        return Err(Error::Ingest("dims needs three components".into()));
                    }
                    dims = Some([parts[0], parts[1], parts[2]]);
                }
                other => {
                    return Err(Error::Ingest(format!("unknown metadata key: {other}")));
                }
            }
            continue;
        }
        if !header_seen {
            if line != CSV_HEADER {
                return Err(Error::Ingest(format!(
                    "unexpected CSV header; expected \"{CSV_HEADER}\""
                )));
            }
            header_seen = true;
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Ingest(format!("bad number on line {}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 19 {
            return Err(Error::Ingest(format!(
                "line {} has {} columns, expected 19",
                lineno + 1,
                vals.len()
            )));
        }
        rows.push(vals);
    }

    if !header_seen {
        return Err(Error::Ingest("missing CSV header".into()));
    }
    let p_inf = p_inf.ok_or_else(|| Error::Ingest("missing metadata key p_inf".into()))?;
    let support_radius =
        support_radius.ok_or_else(|| Error::Ingest("missing metadata key support_radius".into()))?;
    let origin = origin.ok_or_else(|| Error::Ingest("missing metadata key origin".into()))?;
    let spacing = spacing.ok_or_else(|| Error::Ingest("missing metadata key spacing".into()))?;
    let dims = dims.ok_or_else(|| Error::Ingest("missing metadata key dims".into()))?;

    let n = dims[0] * dims[1] * dims[2];
    if rows.len() != n {
        return Err(Error::Ingest(format!(
            "expected {} rows for dims {:?}, found {}",
            n,
            dims,
            rows.len()
        )));
    }

    // Rows are in x-fastest order; spot-check the node coordinates against
    // the declared uniform grid.
    let tol = spacing * 1e-6;
    for &probe in &[0usize, n / 2, n - 1] {
        let i = probe % dims[0];
        let j = (probe / dims[0]) % dims[1];
        let k = probe / (dims[0] * dims[1]);
        let want = [
            origin[0] + i as f64 * spacing,
            origin[1] + j as f64 * spacing,
            origin[2] + k as f64 * spacing,
        ];
        let row = &rows[probe];
        for a in 0..3 {
            if (row[a] - want[a]).abs() > tol {
                return Err(Error::Ingest(format!(
                    "node {probe} coordinate {} = {} does not match the declared uniform grid \
                     (expected {}); non-uniform grids are not supported",
                    ["x", "y", "z"][a],
                    row[a],
                    want[a]
                )));
            }
        }
    }

    let mut u = Vec::with_capacity(n);
    let mut grad_u = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    let mut grad_p = Vec::with_capacity(n);
    for row in &rows {
        u.push([row[3], row[4], row[5]]);
        grad_u.push([
            [row[6], row[7], row[8]],
            [row[9], row[10], row[11]],
            [row[12], row[13], row[14]],
        ]);
        p.push(row[15]);
        grad_p.push([row[16], row[17], row[18]]);
    }

    Ok(RawSeed {
        origin,
        spacing,
        dims,
        u,
        grad_u,
        p,
        grad_p,
        p_inf,
        support_radius,
    })
}

fn parse_vtk(text: &str) -> Result<RawSeed> {
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or("");
    if !magic.starts_with("# vtk DataFile Version") {
        return Err(Error::Ingest("not a legacy VTK file".into()));
    }
    lines.next(); // title
    match lines.next().map(str::trim) {
        Some("ASCII") => {}
        other => {
            return Err(Error::Ingest(format!(
                "only ASCII VTK is supported, found {other:?}"
            )))
        }
    }
    match lines.next().map(str::trim) {
        Some("DATASET STRUCTURED_POINTS") => {}
        other => {
            return Err(Error::Ingest(format!(
                "expected DATASET STRUCTURED_POINTS, found {other:?}"
            )))
        }
    }

    // Tokenize the rest; header keywords and numbers are whitespace separated.
    let rest: Vec<&str> = lines.flat_map(|l| l.split_whitespace()).collect();
    let mut pos = 0usize;
    let mut dims = None;
    let mut origin = None;
    let mut spacing = None;
    let mut npoints = None;

    fn take_f(tokens: &[&str], pos: &mut usize, what: &str) -> Result<f64> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| Error::Ingest(format!("unexpected end of file reading {what}")))?;
        *pos += 1;
        t.parse::<f64>()
            .map_err(|_| Error::Ingest(format!("bad number {t} while reading {what}")))
    }
    fn take_u(tokens: &[&str], pos: &mut usize, what: &str) -> Result<usize> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| Error::Ingest(format!("unexpected end of file reading {what}")))?;
        *pos += 1;
        t.parse::<usize>()
            .map_err(|_| Error::Ingest(format!("bad integer {t} while reading {what}")))
    }

    let mut arrays: Vec<(String, usize, Vec<f64>)> = Vec::new();
    while pos < rest.len() {
        let tok = rest[pos];
        pos += 1;
        match tok {
            "DIMENSIONS" => {
                dims = Some([
                    take_u(&rest, &mut pos, "DIMENSIONS")?,
                    take_u(&rest, &mut pos, "DIMENSIONS")?,
                    take_u(&rest, &mut pos, "DIMENSIONS")?,
                ]);
            }
            "ORIGIN" => {
                origin = Some([
                    take_f(&rest, &mut pos, "ORIGIN")?,
                    take_f(&rest, &mut pos, "ORIGIN")?,
                    take_f(&rest, &mut pos, "ORIGIN")?,
                ]);
            }
            "SPACING" => {
                let sx = take_f(&rest, &mut pos, "SPACING")?;
                let sy = take_f(&rest, &mut pos, "SPACING")?;
                let sz = take_f(&rest, &mut pos, "SPACING")?;
                if sx != sy || sy != sz {
                    return Err(Error::Ingest(format!(
                        "non-uniform spacing ({sx}, {sy}, {sz}) is not supported"
                    )));
                }
                spacing = Some(sx);
            }
            "POINT_DATA" => {
                npoints = Some(take_u(&rest, &mut pos, "POINT_DATA")?);
            }
            "FIELD" => {
                // FIELD <dataName> <numArrays>
                pos += 1; // data name
                let num = take_u(&rest, &mut pos, "FIELD array count")?;
                for _ in 0..num {
                    let name = rest
                        .get(pos)
                        .ok_or_else(|| Error::Ingest("truncated FIELD array".into()))?
                        .to_string();
                    pos += 1;
                    let ncomp = take_u(&rest, &mut pos, "FIELD numComponents")?;
                    let ntuples = take_u(&rest, &mut pos, "FIELD numTuples")?;
                    pos += 1; // data type
                    let count = ncomp * ntuples;
                    let mut data = Vec::with_capacity(count);
                    for _ in 0..count {
                        data.push(take_f(&rest, &mut pos, &name)?);
                    }
                    arrays.push((name, ncomp, data));
                }
            }
            other => {
                return Err(Error::Ingest(format!("unexpected VTK keyword: {other}")));
            }
        }
    }

    let dims = dims.ok_or_else(|| Error::Ingest("missing DIMENSIONS".into()))?;
    let origin = origin.ok_or_else(|| Error::Ingest("missing ORIGIN".into()))?;
    let spacing = spacing.ok_or_else(|| Error::Ingest("missing SPACING".into()))?;
    let n = dims[0] * dims[1] * dims[2];
    if let Some(np) = npoints {
        if np != n {
            return Err(Error::Ingest(format!(
                "POINT_DATA {np} does not match DIMENSIONS product {n}"
            )));
        }
    }

    let find = |name: &str, ncomp: usize, ntuples: usize| -> Result<Vec<f64>> {
        arrays
            .iter()
            .find(|(nm, nc, data)| nm == name && *nc == ncomp && data.len() == ncomp * ntuples)
            .map(|(_, _, data)| data.clone())
            .ok_or_else(|| {
                Error::Ingest(format!(
                    "missing FIELD array {name} with {ncomp} components and {ntuples} tuples"
                ))
            })
    };

    let p_inf = find("p_inf", 1, 1)?[0];
    let support_radius = find("support_radius", 1, 1)?[0];
    let u_flat = find("U", 3, n)?;
    let gu_flat = find("gradU", 9, n)?;
    let p = find("P", 1, n)?;
    let gp_flat = find("gradP", 3, n)?;

    let u = u_flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    let grad_u = gu_flat
        .chunks(9)
        .map(|c| {
            [
                [c[0], c[1], c[2]],
                [c[3], c[4], c[5]],
                [c[6], c[7], c[8]],
            ]
        })
        .collect();
    let grad_p = gp_flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();

    Ok(RawSeed {
        origin,
        spacing,
        dims,
        u,
        grad_u,
        p,
        grad_p,
        p_inf,
        support_radius,
    })
}

#[inline]
fn lerp<T: Real>(a: T, b: T, t: T) -> T {
    // a + t (b - a): reproduces `a` bitwise when both corners agree, which
    // keeps far-field constants exact through the interpolation.
    a + t * (b - a)
}

impl<T: Real> SeedField3<T> {
    fn from_raw(raw: RawSeed) -> Result<Self> {
        for d in raw.dims {
            if d < 2 {
                return Err(Error::Ingest(format!(
                    "grid needs at least 2 nodes per axis, got {:?}",
                    raw.dims
                )));
            }
        }
        if !(raw.spacing > 0.0) {
            return Err(Error::Ingest(format!("bad spacing {}", raw.spacing)));
        }

        let p_min = raw.p.iter().cloned().fold(f64::INFINITY, f64::min);

        let mut max_div = 0.0f64;
        let mut max_orth = 0.0f64;
        for idx in 0..raw.p.len() {
            let gu = &raw.grad_u[idx];
            max_div = max_div.max((gu[0][0] + gu[1][1] + gu[2][2]).abs());
            let u = &raw.u[idx];
            let gp = &raw.grad_p[idx];
            let dot = u[0] * gp[0] + u[1] * gp[1] + u[2] * gp[2];
            let scale = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
                * (gp[0] * gp[0] + gp[1] * gp[1] + gp[2] * gp[2]).sqrt();
            max_orth = max_orth.max(dot.abs() / scale.max(1.0));
        }

        let conv3 = |v: [f64; 3]| [T::of(v[0]), T::of(v[1]), T::of(v[2])];
        Ok(SeedField3 {
            origin: conv3(raw.origin),
            spacing: T::of(raw.spacing),
            dims: raw.dims,
            u: raw.u.into_iter().map(conv3).collect(),
            grad_u: raw
                .grad_u
                .into_iter()
                .map(|g| [conv3(g[0]), conv3(g[1]), conv3(g[2])])
                .collect(),
            p: raw.p.into_iter().map(T::of).collect(),
            grad_p: raw.grad_p.into_iter().map(conv3).collect(),
            p_inf: T::of(raw.p_inf),
            p_min: T::of(p_min),
            support_radius: T::of(raw.support_radius),
            quality: SeedQuality {
                max_divergence: T::of(max_div),
                max_orthogonality: T::of(max_orth),
            },
        })
    }

    pub fn quality(&self) -> SeedQuality<T> {
        self.quality
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Corner weights and indices for trilinear interpolation, or `None`
    /// outside the grid box (where the exact far field applies).
    fn stencil(&self, x: &[T; 3]) -> Option<([usize; 3], [T; 3])> {
        let mut idx = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..3 {
            let rel = (x[a] - self.origin[a]) / self.spacing;
            let top = T::from_usize(self.dims[a] - 1).unwrap();
            if rel < T::zero() || rel > top {
                return None;
            }
            let mut i = rel.floor();
            if i >= top {
                i = top - T::one();
            }
            idx[a] = i.to_usize().unwrap();
            frac[a] = rel - i;
        }
        Some((idx, frac))
    }

    #[inline]
    fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    fn interp<F: Fn(usize) -> T>(&self, sten: &([usize; 3], [T; 3]), get: F) -> T {
        let ([i, j, k], [tx, ty, tz]) = *sten;
        let c00 = lerp(get(self.flat(i, j, k)), get(self.flat(i + 1, j, k)), tx);
        let c10 = lerp(
            get(self.flat(i, j + 1, k)),
            get(self.flat(i + 1, j + 1, k)),
            tx,
        );
        let c01 = lerp(
            get(self.flat(i, j, k + 1)),
            get(self.flat(i + 1, j, k + 1)),
            tx,
        );
        let c11 = lerp(
            get(self.flat(i, j + 1, k + 1)),
            get(self.flat(i + 1, j + 1, k + 1)),
            tx,
        );
        lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz)
    }
}

impl<T: Real> BaseFlow<T, 3> for SeedField3<T> {
    fn velocity(&self, x: &[T; 3]) -> [T; 3] {
        match self.stencil(x) {
            None => [T::zero(); 3],
            Some(st) => {
                let mut out = [T::zero(); 3];
                for (c, slot) in out.iter_mut().enumerate() {
                    *slot = self.interp(&st, |idx| self.u[idx][c]);
                }
                out
            }
        }
    }

    fn velocity_jacobian(&self, x: &[T; 3]) -> [[T; 3]; 3] {
        match self.stencil(x) {
            None => [[T::zero(); 3]; 3],
            Some(st) => {
                let mut out = [[T::zero(); 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        out[i][j] = self.interp(&st, |idx| self.grad_u[idx][i][j]);
                    }
                }
                out
            }
        }
    }

    fn pressure(&self, x: &[T; 3]) -> T {
        match self.stencil(x) {
            None => self.p_inf,
            Some(st) => self.interp(&st, |idx| self.p[idx]),
        }
    }

    fn pressure_gradient(&self, x: &[T; 3]) -> [T; 3] {
        match self.stencil(x) {
            None => [T::zero(); 3],
            Some(st) => {
                let mut out = [T::zero(); 3];
                for (c, slot) in out.iter_mut().enumerate() {
                    *slot = self.interp(&st, |idx| self.grad_p[idx][c]);
                }
                out
            }
        }
    }

    fn p_inf(&self) -> T {
        self.p_inf
    }

    fn p_min(&self) -> T {
        self.p_min
    }

    fn support_radius(&self) -> T {
        self.support_radius
    }

    fn upstream_verified(&self) -> bool {
        false
    }
}
