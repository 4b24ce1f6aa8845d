use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{volume, Extent};

/// Compact 3-D blur kernel with an explicit origin tap.
///
/// Tap `(i, j, l)` sits at offset `(i, j, l) - center` from the origin, so a
/// convolution output at `n` reads input samples at `n - offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel3D {
    extent: Extent,
    center: [usize; 3],
    taps: Vec<f64>,
}

impl Kernel3D {
    pub fn new(extent: Extent, center: [usize; 3], taps: Vec<f64>) -> Result<Self> {
        if extent.contains(&0) {
            return Err(Error::InvalidKernel(format!("empty extent {extent:?}")));
        }
        if (0..3).any(|i| center[i] >= extent[i]) {
            return Err(Error::InvalidKernel(format!("center {center:?} outside extent {extent:?}")));
        }
        if taps.len() != volume(extent) {
            return Err(Error::SampleCount { expected: volume(extent), found: taps.len() });
        }
        if taps.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kernel taps"));
        }
        Ok(Self { extent, center, taps })
    }

    pub fn delta() -> Self {
        Self { extent: [1, 1, 1], center: [0, 0, 0], taps: vec![1.0] }
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn center(&self) -> [usize; 3] {
        self.center
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn tap(&self, t: usize, h: usize, w: usize) -> f64 {
        self.taps[(t * self.extent[1] + h) * self.extent[2] + w]
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let s = self.sum();
        if s.abs() < f64::EPSILON {
            return Err(Error::InvalidKernel("taps sum to zero".into()));
        }
        Ok(Self { taps: self.taps.iter().map(|v| v / s).collect(), ..self.clone() })
    }

    /// `(offset, weight)` for every tap.
    pub fn offsets(&self) -> impl Iterator<Item = ([isize; 3], f64)> + '_ {
        let [et, eh, ew] = self.extent;
        let c = self.center.map(|v| v as isize);
        (0..et).flat_map(move |t| {
            (0..eh).flat_map(move |h| {
                (0..ew).map(move |w| ([t as isize - c[0], h as isize - c[1], w as isize - c[2]], self.tap(t, h, w)))
            })
        })
    }

    /// Errors when the kernel does not fit in `shape`.
    pub fn check_fits(&self, shape: Extent) -> Result<()> {
        if (0..3).any(|i| self.extent[i] > shape[i]) {
            return Err(Error::KernelTooLarge { kernel: self.extent, shape });
        }
        Ok(())
    }

    /// Full linear convolution of two kernels. Origins add, so a temporal-only
    /// kernel composed with a spatial-only one is their outer product.
    pub fn compose(&self, other: &Self) -> Self {
        let extent: Extent = core::array::from_fn(|i| self.extent[i] + other.extent[i] - 1);
        let center = core::array::from_fn(|i| self.center[i] + other.center[i]);
        let mut taps = vec![0.0; volume(extent)];
        for (ao, av) in self.offsets() {
            for (bo, bv) in other.offsets() {
                let idx: [usize; 3] = core::array::from_fn(|i| (ao[i] + bo[i] + center[i] as isize) as usize);
                taps[(idx[0] * extent[1] + idx[1]) * extent[2] + idx[2]] += av * bv;
            }
        }
        Self { extent, center, taps }
    }

    /// Text form: a `K3 kt kh kw ct ch cw` header line, then the taps in
    /// (t, h, w) order, one kernel row per line. Taps print in shortest
    /// round-trip form, so `from_text(to_text())` is exact.
    pub fn to_text(&self) -> String {
        let [et, eh, ew] = self.extent;
        let [ct, ch, cw] = self.center;
        let mut out = format!("K3 {et} {eh} {ew} {ct} {ch} {cw}\n");
        for row in self.taps.chunks(ew) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some("K3") {
            return Err(Error::InvalidKernel("missing K3 header".into()));
        }
        let mut dims = [0usize; 6];
        for d in dims.iter_mut() {
            let tok = tokens.next().ok_or_else(|| Error::InvalidKernel("truncated header".into()))?;
            *d = tok.parse().map_err(|_| Error::InvalidKernel(format!("bad header field {tok:?}")))?;
        }
        let taps = tokens
            .map(|tok| tok.parse::<f64>().map_err(|_| Error::InvalidKernel(format!("bad tap {tok:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new([dims[0], dims[1], dims[2]], [dims[3], dims[4], dims[5]], taps)
    }
}
