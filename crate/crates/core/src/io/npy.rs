//! Minimal NPY v1.0 reader/writer for little-endian `f4`/`f8` C-order arrays.
//!
//! Layout: `\x93NUMPY`, version bytes `1 0`, a little-endian `u16` header
//! length, then an ASCII dict literal padded with spaces so the data starts on
//! a 64-byte boundary, terminated by `\n`, then the raw values.

use std::path::Path;

use crate::analytics::KernelSet;
use crate::dog::Kernel;
use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;
const MAX_RANK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::F64 => "<f8",
        }
    }

    pub fn item_size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    fn from_descr(descr: &str) -> Result<Self> {
        match descr {
            "<f4" => Ok(Dtype::F32),
            "<f8" => Ok(Dtype::F64),
            other => Err(Error::Unsupported(format!("dtype {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArrayData {
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl ArrayData {
    pub fn len(&self) -> usize {
        match self {
            ArrayData::F32(v) => v.len(),
            ArrayData::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            ArrayData::F32(_) => Dtype::F32,
            ArrayData::F64(_) => Dtype::F64,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            ArrayData::F32(v) => v.iter().map(|&x| f64::from(x)).collect(),
            ArrayData::F64(v) => v.clone(),
        }
    }
}

/// A dense C-order tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayFile {
    shape: Vec<usize>,
    data: ArrayData,
}

fn element_count(shape: &[usize]) -> Result<usize> {
    if shape.is_empty() || shape.len() > MAX_RANK {
        return Err(Error::Unsupported(format!("rank {} (supported: 1 to {MAX_RANK})", shape.len())));
    }
    if shape.contains(&0) {
        return Err(Error::InvalidInput(format!("shape {shape:?} has a zero dimension")));
    }
    shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|n| n.checked_mul(8).is_some())
        .ok_or_else(|| Error::ShapeOverflow(shape.to_vec()))
}

impl ArrayFile {
    pub fn new(shape: Vec<usize>, data: ArrayData) -> Result<Self> {
        let n = element_count(&shape)?;
        if n != data.len() {
            return Err(Error::InvalidInput(format!(
                "shape {shape:?} needs {n} values, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &ArrayData {
        &self.data
    }

    pub fn dtype(&self) -> Dtype {
        self.data.dtype()
    }

    /// Stacks kernels into the depthwise weight layout `[N, 1, K, K]`.
    pub fn from_kernels(kernels: &[Kernel], dtype: Dtype) -> Result<Self> {
        let Some(first) = kernels.first() else {
            return Err(Error::InvalidInput("no kernels to stack".into()));
        };
        let k = first.size();
        if kernels.iter().any(|x| x.size() != k) {
            return Err(Error::InvalidInput("kernels must share one size".into()));
        }
        let flat = kernels.iter().flat_map(|x| x.weights().iter().copied());
        let data = match dtype {
            Dtype::F32 => ArrayData::F32(flat.map(|v| v as f32).collect()),
            Dtype::F64 => ArrayData::F64(flat.collect()),
        };
        Self::new(vec![kernels.len(), 1, k, k], data)
    }

    /// Splits an `[N, K, K]` or `[N, 1, K, K]` tensor into kernels.
    pub fn to_kernels(&self) -> Result<Vec<Kernel>> {
        let (n, k) = match self.shape[..] {
            [n, a, b] if a == b => (n, a),
            [n, 1, a, b] if a == b => (n, a),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "expected depthwise layout [N, K, K] or [N, 1, K, K], got {:?}",
                    self.shape
                )))
            }
        };
        let values = self.data.to_f64();
        (0..n)
            .map(|i| Kernel::new(k, values[i * k * k..(i + 1) * k * k].to_vec()))
            .collect()
    }

    pub fn to_kernel_set(&self, source: impl Into<String>) -> Result<KernelSet> {
        KernelSet::new(self.to_kernels()?, source)
    }
}

fn header_text(array: &ArrayFile) -> String {
    let dims: Vec<String> = array.shape.iter().map(|d| d.to_string()).collect();
    let shape = if dims.len() == 1 {
        format!("({},)", dims[0])
    } else {
        format!("({})", dims.join(", "))
    };
    let mut header = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        array.dtype().descr(),
        shape
    );
    let unpadded = MAGIC.len() + 2 + 2 + header.len() + 1;
    let padding = (ALIGN - unpadded % ALIGN) % ALIGN;
    header.extend(std::iter::repeat_n(' ', padding));
    header.push('\n');
    header
}

pub fn encode_npy(array: &ArrayFile) -> Result<Vec<u8>> {
    let header = header_text(array);
    let header_len = u16::try_from(header.len())
        .map_err(|_| Error::MalformedHeader("header longer than 65535 bytes".into()))?;
    let mut out = Vec::with_capacity(10 + header.len() + array.data.len() * array.dtype().item_size());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&header_len.to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    match &array.data {
        ArrayData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        ArrayData::F64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
    }
    Ok(out)
}

#[derive(Debug, PartialEq)]
enum Value {
    Str(String),
    Bool(bool),
    Tuple(Vec<usize>),
}

/// Parser for the restricted Python dict literal found in NPY headers.
struct HeaderParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> HeaderParser<'a> {
    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::MalformedHeader(format!("{what} at byte {}", self.pos)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(&format!("expected {:?}", c as char))
        }
    }

    fn string(&mut self) -> Result<String> {
        self.skip_ws();
        let quote = match self.s.get(self.pos) {
            Some(&q @ (b'\'' | b'"')) => q,
            _ => return self.err("expected string"),
        };
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != quote {
            self.pos += 1;
        }
        if self.pos >= self.s.len() {
            return self.err("unterminated string");
        }
        let text = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        self.pos += 1;
        Ok(text)
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or_default();
        if digits.is_empty() {
            return self.err("expected integer");
        }
        digits
            .parse()
            .map_err(|_| Error::MalformedHeader(format!("dimension {digits} out of range")))
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        if rest.starts_with(b"True") {
            self.pos += 4;
            return Ok(Value::Bool(true));
        }
        if rest.starts_with(b"False") {
            self.pos += 5;
            return Ok(Value::Bool(false));
        }
        if self.eat(b'(') {
            let mut dims = Vec::new();
            loop {
                if self.eat(b')') {
                    break;
                }
                dims.push(self.integer()?);
                if !self.eat(b',') {
                    self.expect(b')')?;
                    break;
                }
            }
            return Ok(Value::Tuple(dims));
        }
        Ok(Value::Str(self.string()?))
    }

    fn dict(&mut self) -> Result<Vec<(String, Value)>> {
        self.expect(b'{')?;
        let mut entries = Vec::new();
        loop {
            if self.eat(b'}') {
                break;
            }
            let key = self.string()?;
            self.expect(b':')?;
            let value = self.value()?;
            entries.push((key, value));
            if !self.eat(b',') {
                self.expect(b'}')?;
                break;
            }
        }
        self.skip_ws();
        if self.pos != self.s.len() {
            return self.err("trailing characters after header dict");
        }
        Ok(entries)
    }
}

pub fn decode_npy(bytes: &[u8]) -> Result<ArrayFile> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err(Error::MalformedHeader("missing NPY magic".into()));
    }
    if bytes[6..8] != [1, 0] {
        return Err(Error::Unsupported(format!("NPY version {}.{}", bytes[6], bytes[7])));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_start = 10 + header_len;
    if bytes.len() < data_start {
        return Err(Error::MalformedHeader("header runs past end of file".into()));
    }
    let header = &bytes[10..data_start];
    if !header.is_ascii() || header.last() != Some(&b'\n') {
        return Err(Error::MalformedHeader("header must be ASCII and end in a newline".into()));
    }
    let entries = HeaderParser { s: header, pos: 0 }.dict()?;

    let (mut descr, mut fortran, mut shape) = (None, None, None);
    for (key, value) in entries {
        match (key.as_str(), value) {
            ("descr", Value::Str(s)) => descr = Some(s),
            ("fortran_order", Value::Bool(b)) => fortran = Some(b),
            ("shape", Value::Tuple(t)) => shape = Some(t),
            (k, v) => return Err(Error::MalformedHeader(format!("unexpected entry {k:?}: {v:?}"))),
        }
    }
    let (Some(descr), Some(fortran), Some(shape)) = (descr, fortran, shape) else {
        return Err(Error::MalformedHeader("descr, fortran_order and shape are required".into()));
    };
    if fortran {
        return Err(Error::Unsupported("fortran_order arrays".into()));
    }
    let dtype = Dtype::from_descr(&descr)?;
    let n = element_count(&shape)?;
    let payload = &bytes[data_start..];
    let expected = n * dtype.item_size();
    if payload.len() < expected {
        return Err(Error::TruncatedData {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::MalformedHeader(format!(
            "{} bytes of data beyond the declared shape",
            payload.len() - expected
        )));
    }
    let data = match dtype {
        Dtype::F32 => ArrayData::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::F64 => ArrayData::F64(
            payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
    };
    ArrayFile::new(shape, data)
}

pub fn write_array(path: impl AsRef<Path>, array: &ArrayFile) -> Result<()> {
    super::write_atomic(path.as_ref(), &encode_npy(array)?)
}

pub fn read_array(path: impl AsRef<Path>) -> Result<ArrayFile> {
    decode_npy(&std::fs::read(path)?)
}
