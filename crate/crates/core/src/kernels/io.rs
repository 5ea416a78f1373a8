//! Binary dump of an assembled kernel matrix.
//!
//! Layout (little-endian throughout):
//!   magic  5 bytes  "CSLK1"
//!   d      u32
//!   kind   u8       0 = interaction, 1 = difference quotient
//!   param  f64      alpha or s
//!   policy u8       0 = excluded diagonal, 1 = cell averaged
//!   n      u64
//!   nodes  n * f64
//!   upper  n(n+1)/2 * f64   rows i, columns j >= i
//!   mflag  u8       1 if diagonal cell masses follow
//!   mass   n * f64  only when mflag = 1

use std::io::{Read, Write};

use crate::error::{CslError, Result};
use crate::kernels::point::KernelKind;
use crate::kernels::{DiagonalPolicy, KernelMatrix, KernelSpec};

const MAGIC: &[u8; 5] = b"CSLK1";

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<R, 8>(r)?))
}

impl KernelMatrix {
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.spec.d.to_le_bytes())?;
        let (tag, param) = match self.spec.kind {
            KernelKind::Riesz { alpha } => (0u8, alpha),
            KernelKind::Gagliardo { s } => (1u8, s),
        };
        w.write_all(&[tag])?;
        write_f64(w, param)?;
        w.write_all(&[match self.policy {
            DiagonalPolicy::Excluded => 0u8,
            DiagonalPolicy::CellAveraged => 1u8,
        }])?;
        let n = self.n();
        w.write_all(&(n as u64).to_le_bytes())?;
        for &r in self.nodes() {
            write_f64(w, r)?;
        }
        for i in 0..n {
            for j in i..n {
                write_f64(w, self.entry(i, j))?;
            }
        }
        if self.diag_cell_mass.is_empty() {
            w.write_all(&[0u8])?;
        } else {
            w.write_all(&[1u8])?;
            for &m in &self.diag_cell_mass {
                write_f64(w, m)?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let magic = read_exact::<R, 5>(r)?;
        if &magic != MAGIC {
            return Err(CslError::Format(format!("bad magic {magic:?}, expected {MAGIC:?}")));
        }
        let d = u32::from_le_bytes(read_exact::<R, 4>(r)?);
        let tag = read_exact::<R, 1>(r)?[0];
        let param = read_f64(r)?;
        let kind = match tag {
            0 => KernelKind::Riesz { alpha: param },
            1 => KernelKind::Gagliardo { s: param },
            other => return Err(CslError::Format(format!("unknown kernel tag {other}"))),
        };
        let policy = match read_exact::<R, 1>(r)?[0] {
            0 => DiagonalPolicy::Excluded,
            1 => DiagonalPolicy::CellAveraged,
            other => return Err(CslError::Format(format!("unknown diagonal policy {other}"))),
        };
        let n = u64::from_le_bytes(read_exact::<R, 8>(r)?) as usize;
        if n == 0 || n > crate::kernels::MAX_KERNEL_NODES {
            return Err(CslError::Format(format!("node count {n} out of range")));
        }
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            nodes.push(read_f64(r)?);
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = read_f64(r)?;
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        let diag_cell_mass = match read_exact::<R, 1>(r)?[0] {
            0 => Vec::new(),
            1 => {
                let mut m = Vec::with_capacity(n);
                for _ in 0..n {
                    m.push(read_f64(r)?);
                }
                m
            }
            other => return Err(CslError::Format(format!("unknown mass flag {other}"))),
        };
        let spec = KernelSpec { d, kind };
        spec.validate()?;
        Ok(Self::from_parts(spec, policy, nodes, data, diag_cell_mass))
    }
}
