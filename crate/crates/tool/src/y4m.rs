//! YUV4MPEG2 reading and writing.
//!
//! Header tokens and per-frame parameters are kept verbatim so a stream
//! read and written back is byte-identical.

use std::io::{BufRead, Read, Write};

use cdef_core::{Frame, Plane, Subsampling};

#[derive(Debug, thiserror::Error)]
pub enum Y4mError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("frame {frame}: expected {expected} payload bytes, got {got}")]
    ShortFrame { frame: usize, expected: usize, got: usize },
    #[error("frame {frame}: {source}")]
    Samples { frame: usize, source: cdef_core::CdefError },
}

const MAGIC: &str = "YUV4MPEG2";

/// Parsed stream header. `tokens` holds every token after the magic, in
/// order, including `W`, `H` and `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub subsampling: Subsampling,
    pub bit_depth: u8,
    pub tokens: Vec<String>,
}

impl Y4mHeader {
    /// Header for a progressive stream at 30 fps.
    pub fn new(width: usize, height: usize, subsampling: Subsampling, bit_depth: u8) -> Self {
        let tokens = vec![
            format!("W{width}"),
            format!("H{height}"),
            "F30:1".to_string(),
            "Ip".to_string(),
            "A1:1".to_string(),
            format!("C{}", colorspace_tag(subsampling, bit_depth)),
        ];
        Y4mHeader { width, height, subsampling, bit_depth, tokens }
    }

    pub fn parse(line: &str) -> Result<Self, Y4mError> {
        let mut parts = line.split(' ');
        if parts.next() != Some(MAGIC) {
            return Err(Y4mError::Header(format!("missing {MAGIC} magic")));
        }
        let tokens: Vec<String> = parts.map(str::to_string).collect();
        let mut width = None;
        let mut height = None;
        let mut colorspace = (Subsampling::Cs420, 8);
        for t in &tokens {
            let (key, value) = t.split_at(t.chars().next().map_or(0, char::len_utf8));
            match key {
                "W" => width = Some(parse_dim(value, "width")?),
                "H" => height = Some(parse_dim(value, "height")?),
                "C" => colorspace = parse_colorspace(value)?,
                "" => return Err(Y4mError::Header("empty token".into())),
                _ => {}
            }
        }
        let width = width.ok_or_else(|| Y4mError::Header("missing W".into()))?;
        let height = height.ok_or_else(|| Y4mError::Header("missing H".into()))?;
        Ok(Y4mHeader {
            width,
            height,
            subsampling: colorspace.0,
            bit_depth: colorspace.1,
            tokens,
        })
    }

    fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    fn plane_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = vec![(self.width, self.height)];
        if self.subsampling.has_chroma() {
            let c = self.subsampling.chroma_dims(self.width, self.height);
            dims.extend([c, c]);
        }
        dims
    }

    pub fn frame_bytes(&self) -> usize {
        self.plane_dims().iter().map(|(w, h)| w * h).sum::<usize>() * self.bytes_per_sample()
    }

    fn line(&self) -> String {
        let mut s = MAGIC.to_string();
        for t in &self.tokens {
            s.push(' ');
            s.push_str(t);
        }
        s
    }
}

fn parse_dim(value: &str, what: &str) -> Result<usize, Y4mError> {
    match value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Y4mError::Header(format!("bad {what} {value:?}"))),
    }
}

fn parse_colorspace(tag: &str) -> Result<(Subsampling, u8), Y4mError> {
    let bad = || Y4mError::Header(format!("unsupported colorspace C{tag}"));
    let (ss, rest) = if let Some(r) = tag.strip_prefix("mono") {
        (Subsampling::Cs400, r)
    } else if let Some(r) = tag.strip_prefix("420") {
        (Subsampling::Cs420, r)
    } else if let Some(r) = tag.strip_prefix("422") {
        (Subsampling::Cs422, r)
    } else if let Some(r) = tag.strip_prefix("444") {
        (Subsampling::Cs444, r)
    } else {
        return Err(bad());
    };
    let depth = match rest {
        "" | "jpeg" | "paldv" | "mpeg2" => 8,
        _ => {
            let digits = rest.strip_prefix('p').unwrap_or(rest);
            match digits.parse::<u8>() {
                Ok(d @ (8 | 10 | 12)) => d,
                _ => return Err(bad()),
            }
        }
    };
    Ok((ss, depth))
}

fn colorspace_tag(ss: Subsampling, bit_depth: u8) -> String {
    match (ss, bit_depth) {
        (Subsampling::Cs400, 8) => "mono".into(),
        (Subsampling::Cs400, d) => format!("mono{d}"),
        (Subsampling::Cs420, 8) => "420jpeg".into(),
        (s, d) => {
            let base = match s {
                Subsampling::Cs420 => "420",
                Subsampling::Cs422 => "422",
                _ => "444",
            };
            if d == 8 {
                base.into()
            } else {
                format!("{base}p{d}")
            }
        }
    }
}

/// A frame together with the parameter tokens of its `FRAME` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mFrame {
    pub params: String,
    pub frame: Frame,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mStream {
    pub header: Y4mHeader,
    pub frames: Vec<Y4mFrame>,
}

impl Y4mStream {
    pub fn new(header: Y4mHeader) -> Self {
        Y4mStream { header, frames: Vec::new() }
    }

    /// Stream holding `frames` with a fresh header.
    pub fn from_frames(frames: Vec<Frame>) -> Result<Self, Y4mError> {
        let first = frames.first().ok_or_else(|| Y4mError::Header("no frames".into()))?;
        let header = Y4mHeader::new(first.width(), first.height(), first.subsampling(), first.bit_depth());
        let mut s = Y4mStream::new(header);
        for f in frames {
            s.push(f)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, frame: Frame) -> Result<(), Y4mError> {
        let h = &self.header;
        if (frame.width(), frame.height(), frame.subsampling(), frame.bit_depth())
            != (h.width, h.height, h.subsampling, h.bit_depth)
        {
            return Err(Y4mError::Header("frame does not match stream header".into()));
        }
        self.frames.push(Y4mFrame { params: String::new(), frame });
        Ok(())
    }

    /// Same header and frame parameters with new pixel data.
    pub fn with_frames(&self, frames: Vec<Frame>) -> Result<Self, Y4mError> {
        let mut out = Y4mStream::new(self.header.clone());
        for (i, f) in frames.into_iter().enumerate() {
            out.push(f)?;
            if let Some(src) = self.frames.get(i) {
                out.frames[i].params.clone_from(&src.params);
            }
        }
        Ok(out)
    }

    pub fn frames(&self) -> impl Iterator<Item = &Frame> {
        self.frames.iter().map(|f| &f.frame)
    }
}

fn read_line(r: &mut impl BufRead) -> Result<Option<String>, Y4mError> {
    let mut buf = Vec::new();
    if r.read_until(b'\n', &mut buf)? == 0 {
        return Ok(None);
    }
    if buf.pop() != Some(b'\n') {
        return Err(Y4mError::Header("unterminated line".into()));
    }
    String::from_utf8(buf)
        .map(Some)
        .map_err(|_| Y4mError::Header("non-ASCII header".into()))
}

pub fn read_y4m(r: impl Read) -> Result<Y4mStream, Y4mError> {
    let mut r = std::io::BufReader::new(r);
    let line = read_line(&mut r)?.ok_or_else(|| Y4mError::Header("empty stream".into()))?;
    let header = Y4mHeader::parse(&line)?;
    let bps = header.bytes_per_sample();
    let dims = header.plane_dims();
    let mut stream = Y4mStream::new(header);
    let mut payload = vec![0u8; stream.header.frame_bytes()];
    while let Some(line) = read_line(&mut r)? {
        let index = stream.frames.len();
        let params = match line.strip_prefix("FRAME") {
            Some(p) if p.is_empty() || p.starts_with(' ') => p.to_string(),
            _ => return Err(Y4mError::Header(format!("frame {index}: expected FRAME marker"))),
        };
        let got = read_full(&mut r, &mut payload)?;
        if got < payload.len() {
            return Err(Y4mError::ShortFrame { frame: index, expected: payload.len(), got });
        }
        let mut planes = Vec::with_capacity(dims.len());
        let mut offset = 0;
        for &(w, h) in &dims {
            let n = w * h;
            let bytes = &payload[offset..offset + n * bps];
            offset += n * bps;
            let samples = if bps == 1 {
                bytes.iter().map(|&b| u16::from(b)).collect()
            } else {
                bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect()
            };
            let plane = Plane::from_samples(w, h, stream.header.bit_depth, samples)
                .map_err(|source| Y4mError::Samples { frame: index, source })?;
            planes.push(plane);
        }
        let mut it = planes.into_iter();
        let luma = it.next().expect("luma plane");
        let chroma = match (it.next(), it.next()) {
            (Some(u), Some(v)) => Some([u, v]),
            _ => None,
        };
        let frame = Frame::new(luma, chroma, stream.header.subsampling)
            .map_err(|source| Y4mError::Samples { frame: index, source })?;
        stream.frames.push(Y4mFrame { params, frame });
    }
    Ok(stream)
}

fn read_full(r: &mut impl Read, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

pub fn write_y4m(stream: &Y4mStream, w: impl Write) -> Result<(), Y4mError> {
    let mut w = std::io::BufWriter::new(w);
    writeln!(w, "{}", stream.header.line())?;
    let wide = stream.header.bytes_per_sample() == 2;
    let mut buf = Vec::with_capacity(stream.header.frame_bytes());
    for f in &stream.frames {
        writeln!(w, "FRAME{}", f.params)?;
        buf.clear();
        for plane in f.frame.planes() {
            if wide {
                buf.extend(plane.samples().iter().flat_map(|s| s.to_le_bytes()));
            } else {
                buf.extend(plane.samples().iter().map(|&s| s as u8));
            }
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_y4m_file(path: &std::path::Path) -> Result<Y4mStream, Y4mError> {
    read_y4m(std::fs::File::open(path)?)
}

pub fn write_y4m_file(stream: &Y4mStream, path: &std::path::Path) -> Result<(), Y4mError> {
    write_y4m(stream, std::fs::File::create(path)?)
}
