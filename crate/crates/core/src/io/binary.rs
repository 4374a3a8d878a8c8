use crate::error::{Error, Result};

/// Little-endian byte sink.
#[derive(Default)]
pub(crate) struct Writer {
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn f64s(&mut self, v: &[f64]) {
        for x in v {
            self.bytes(&x.to_le_bytes());
        }
    }

    pub fn f32s(&mut self, v: &[f32]) {
        for x in v {
            self.bytes(&x.to_le_bytes());
        }
    }

    /// Appends the CRC-32 of everything written so far.
    pub fn finish(mut self) -> Vec<u8> {
        let crc = crc32fast::hash(&self.buf);
        self.u32(crc);
        self.buf
    }
}

/// Bounds-checked little-endian cursor; errors carry the byte offset.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pub pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::format(
                self.buf.len() as u64,
                format!("file truncated while reading {what} at byte {}", self.pos),
            )),
        }
    }

    pub fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    pub fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    /// A count that must fit in memory, checked against the bytes left.
    pub fn len(&mut self, what: &str, elem_size: usize) -> Result<usize> {
        let at = self.pos as u64;
        let n = self.u64(what)?;
        let remaining = (self.buf.len() - self.pos) as u64;
        match n.checked_mul(elem_size as u64) {
            Some(bytes) if bytes <= remaining => Ok(n as usize),
            _ => Err(Error::format(at, format!("{what} of {n} exceeds the file size"))),
        }
    }

    pub fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let b = self.take(n.checked_mul(8).ok_or_else(|| Error::format(self.pos as u64, "size overflow"))?, what)?;
        Ok(b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    pub fn f32s(&mut self, n: usize, what: &str) -> Result<Vec<f32>> {
        let b = self.take(n.checked_mul(4).ok_or_else(|| Error::format(self.pos as u64, "size overflow"))?, what)?;
        Ok(b.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }

    pub fn text(&mut self, what: &str) -> Result<&'a str> {
        let n = self.len(what, 1)?;
        let at = self.pos as u64;
        std::str::from_utf8(self.take(n, what)?).map_err(|e| Error::format(at, format!("{what} is not UTF-8: {e}")))
    }

    /// Checks the magic bytes and format version.
    pub fn header(&mut self, magic: &[u8; 4], version: u16) -> Result<()> {
        let m = self.take(4, "magic")?;
        if m != magic {
            return Err(Error::format(0, format!("bad magic {:?}, expected {:?}", String::from_utf8_lossy(m), String::from_utf8_lossy(magic))));
        }
        let v = self.u16("version")?;
        if v != version {
            return Err(Error::format(4, format!("unsupported format version {v}, expected {version}")));
        }
        Ok(())
    }

    /// Verifies the trailing CRC-32 over everything before it and that no
    /// bytes follow.
    pub fn checksum(&mut self) -> Result<()> {
        let body_end = self.pos;
        let stored = self.u32("checksum")?;
        let actual = crc32fast::hash(&self.buf[..body_end]);
        if stored != actual {
            return Err(Error::format(
                body_end as u64,
                format!("checksum mismatch: stored {stored:08x}, computed {actual:08x}"),
            ));
        }
        if self.pos != self.buf.len() {
            return Err(Error::format(self.pos as u64, format!("{} unexpected trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

pub(crate) fn toml_text<T: serde::Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::config("metadata", e.to_string()))
}

pub(crate) fn parse_meta<T: serde::de::DeserializeOwned>(text: &str, offset: usize) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::format(offset as u64, format!("invalid metadata: {e}")))
}
