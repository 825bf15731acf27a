//! Byte formats for queries, responses, secrets and databases, and a small
//! framed request/response service over TCP.
//!
//! All integers are little-endian and every field element takes whole bytes
//! (one byte per `F_q` coefficient). Each file starts with a magic string and
//! a version byte, then the parameter header `(q, s, v, n, k, m, L)` as seven
//! `u32`s.
//!
//! There is no transport security: anyone on the path sees exactly what the
//! server sees, which the scheme already treats as the adversary.

use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use crate::code::{InfoSet, LinearCode};
use crate::error::{Error, Result};
use crate::gf::{BaseField, BasisGamma, ExtField};
use crate::linalg::{MatBase, MatExt};
use crate::pir::{respond, Database, Query, QueryDigest, QuerySecret, Response, SchemeParams};

pub const VERSION: u8 = 1;

pub const QUERY_MAGIC: &[u8] = b"CPIRQRY";
pub const RESPONSE_MAGIC: &[u8] = b"CPIRRSP";
pub const SECRET_MAGIC: &[u8] = b"CPIRSEC";
pub const DATABASE_MAGIC: &[u8] = b"CPIRDB";

const PARAMS_LEN: usize = 7 * 4;
const MATRIX_HEADER_LEN: usize = 8;
/// Frames above this size are rejected before allocating.
pub const MAX_FRAME_LEN: u32 = 1 << 30;

struct Writer(Vec<u8>);

impl Writer {
    fn new(magic: &[u8]) -> Self {
        let mut out = magic.to_vec();
        out.push(VERSION);
        Writer(out)
    }

    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }

    fn u16(&mut self, x: u16) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }

    fn u32(&mut self, x: usize) {
        let x = u32::try_from(x).expect("sizes are validated to fit in 32 bits");
        self.0.extend_from_slice(&x.to_le_bytes());
    }

    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.0.extend_from_slice(b);
    }

    fn params(&mut self, p: &SchemeParams) {
        self.u32(p.q as usize);
        for x in [p.s, p.v, p.n, p.k, p.m, p.l] {
            self.u32(x);
        }
    }

    fn field(&mut self, f: &ExtField) {
        let base = f.base();
        self.bytes(b"GF");
        self.u8(base.w());
        self.u8(base.modulus_mask());
        self.u16(f.degree() as u16);
        self.bytes(f.modulus());
    }

    fn mat_base(&mut self, m: &MatBase) {
        self.u32(m.rows());
        self.u32(m.cols());
        self.bytes(m.data());
    }

    fn mat_ext(&mut self, m: &MatExt) {
        self.u32(m.rows());
        self.u32(m.cols());
        self.bytes(m.data());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], magic: &[u8]) -> Result<Self> {
        if buf.len() < magic.len() || &buf[..magic.len()] != magic {
            return Err(Error::BadMagic);
        }
        let mut r = Reader { buf, pos: magic.len() };
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| {
            Error::dims(format!("truncated input: need {n} bytes at offset {}, have {}", self.pos, self.buf.len()))
        })?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn params(&mut self) -> Result<SchemeParams> {
        let q = self.u32()? as u32;
        let mut x = [0usize; 6];
        for v in &mut x {
            *v = self.u32()?;
        }
        let [s, v, n, k, m, l] = x;
        SchemeParams::new(q, s, v, n, k, m, l).map_err(|e| Error::Malformed(format!("parameter header: {e}")))
    }

    fn field(&mut self) -> Result<ExtField> {
        if self.take(2)? != b"GF" {
            return Err(Error::Malformed("missing field spec tag".into()));
        }
        let w = self.u8()?;
        let mask = self.u8()?;
        let s = self.u16()? as usize;
        if !(1..=8).contains(&w) || s == 0 {
            return Err(Error::Malformed(format!("field spec w={w}, s={s}")));
        }
        let modulus = self.take(s + 1)?.to_vec();
        let base = BaseField::with_modulus(w, (1u16 << w) | mask as u16)
            .map_err(|e| Error::Malformed(format!("base field: {e}")))?;
        ExtField::new(base, modulus).map_err(|e| Error::Malformed(format!("extension field: {e}")))
    }

    fn mat_base(&mut self, base: &BaseField) -> Result<MatBase> {
        let (rows, cols) = (self.u32()?, self.u32()?);
        let len = rows.checked_mul(cols).ok_or_else(|| Error::dims("matrix size overflows"))?;
        let data = self.take(len)?.to_vec();
        if data.iter().any(|&b| !base.contains(b)) {
            return Err(Error::Malformed("matrix entry outside the base field".into()));
        }
        MatBase::new(rows, cols, data)
    }

    fn mat_ext(&mut self, field: &ExtField) -> Result<MatExt> {
        let s = field.degree();
        let (rows, cols) = (self.u32()?, self.u32()?);
        let len = rows
            .checked_mul(cols)
            .and_then(|x| x.checked_mul(s))
            .ok_or_else(|| Error::dims("matrix size overflows"))?;
        let data = self.take(len)?.to_vec();
        if data.iter().any(|&b| !field.base().contains(b)) {
            return Err(Error::Malformed("matrix entry outside the base field".into()));
        }
        MatExt::new(rows, cols, s, data)
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::dims(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn check_shape(what: &str, got: (usize, usize), want: (usize, usize)) -> Result<()> {
    if got != want {
        return Err(Error::dims(format!(
            "{what} is {}x{}, header says {}x{}",
            got.0, got.1, want.0, want.1
        )));
    }
    Ok(())
}

fn check_field(f: &ExtField, p: &SchemeParams) -> Result<()> {
    if f.degree() != p.s || f.base().order() != p.q as usize {
        return Err(Error::ParamMismatch(format!(
            "field spec is GF({}^{}), header says q={}, s={}",
            f.base().order(),
            f.degree(),
            p.q,
            p.s
        )));
    }
    Ok(())
}

/// Bytes before the query matrix entries: magic, version, params, field
/// spec and matrix dimensions.
pub fn query_header_len(s: usize) -> usize {
    QUERY_MAGIC.len() + 1 + PARAMS_LEN + 6 + (s + 1) + MATRIX_HEADER_LEN
}

pub fn response_header_len() -> usize {
    RESPONSE_MAGIC.len() + 1 + PARAMS_LEN + 32 + MATRIX_HEADER_LEN
}

/// Query matrix entries in bytes: `mδ · n · s · ⌈w/8⌉`.
pub fn query_payload_len(p: &SchemeParams) -> usize {
    p.query_rows() * p.n * p.s
}

/// Response matrix entries in bytes: `L · n · s · ⌈w/8⌉`.
pub fn response_payload_len(p: &SchemeParams) -> usize {
    p.l * p.n * p.s
}

pub fn encode_query(q: &Query) -> Vec<u8> {
    let mut w = Writer::new(QUERY_MAGIC);
    w.params(q.params());
    w.field(q.field());
    w.mat_ext(q.matrix());
    w.0
}

pub fn decode_query(buf: &[u8]) -> Result<Query> {
    let mut r = Reader::new(buf, QUERY_MAGIC)?;
    let p = r.params()?;
    let field = r.field()?;
    check_field(&field, &p)?;
    let m = r.mat_ext(&field)?;
    r.finish()?;
    check_shape("query", (m.rows(), m.cols()), (p.query_rows(), p.n))?;
    Query::new(p, field, m)
}

pub fn encode_response(a: &Response) -> Vec<u8> {
    let mut w = Writer::new(RESPONSE_MAGIC);
    w.params(a.params());
    w.bytes(a.query_digest());
    w.mat_ext(a.matrix());
    w.0
}

/// The response carries no field spec; entries are only range-checked
/// against `q`.
pub fn decode_response(buf: &[u8]) -> Result<Response> {
    let mut r = Reader::new(buf, RESPONSE_MAGIC)?;
    let p = r.params()?;
    let digest: QueryDigest = r.take(32)?.try_into().expect("32 bytes");
    let (rows, cols) = (r.u32()?, r.u32()?);
    check_shape("response", (rows, cols), (p.l, p.n))?;
    let data = r.take(rows * cols * p.s)?.to_vec();
    r.finish()?;
    if data.iter().any(|&b| b as u32 >= p.q) {
        return Err(Error::Malformed("response entry outside the base field".into()));
    }
    Response::new(p, digest, MatExt::new(rows, cols, p.s, data)?)
}

pub fn encode_secret(sec: &QuerySecret) -> Vec<u8> {
    let mut w = Writer::new(SECRET_MAGIC);
    w.params(sec.params());
    w.u32(sec.index());
    w.field(sec.field());
    w.mat_ext(sec.code().generator());
    for &i in sec.info_set().info() {
        w.u32(i);
    }
    w.mat_base(sec.basis().matrix());
    w.mat_ext(sec.delta_hat());
    match sec.seed() {
        Some(seed) => {
            w.u8(1);
            w.u64(seed);
        }
        None => {
            w.u8(0);
            w.u64(0);
        }
    }
    w.bytes(sec.query_digest());
    w.0
}

pub fn decode_secret(buf: &[u8]) -> Result<QuerySecret> {
    let mut r = Reader::new(buf, SECRET_MAGIC)?;
    let p = r.params()?;
    let index = r.u32()?;
    let field = r.field()?;
    check_field(&field, &p)?;
    let g = r.mat_ext(&field)?;
    check_shape("generator", (g.rows(), g.cols()), (p.k, p.n))?;
    let info = (0..p.k).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let b = r.mat_base(field.base())?;
    check_shape("basis", (b.rows(), b.cols()), (p.s, p.s))?;
    let delta_hat = r.mat_ext(&field)?;
    check_shape("Δ̂", (delta_hat.rows(), delta_hat.cols()), (p.delta(), p.n - p.k))?;
    let seed = match (r.u8()?, r.u64()?) {
        (0, _) => None,
        (1, s) => Some(s),
        (f, _) => return Err(Error::Malformed(format!("seed flag {f}"))),
    };
    let digest: QueryDigest = r.take(32)?.try_into().expect("32 bytes");
    r.finish()?;

    let malformed = |what: &str, e: Error| Error::Malformed(format!("{what}: {e}"));
    let code = LinearCode::from_generator(field.clone(), g).map_err(|e| malformed("generator", e))?;
    let iset = InfoSet::new(&code, info).map_err(|e| malformed("information set", e))?;
    let basis = BasisGamma::from_matrix(field.base().clone(), b, p.v).map_err(|e| malformed("basis", e))?;
    QuerySecret::from_parts(p, code, iset, basis, index, delta_hat, seed, digest)
}

pub fn encode_database(db: &Database) -> Vec<u8> {
    let mut w = Writer::new(DATABASE_MAGIC);
    w.params(db.params());
    w.mat_base(db.matrix());
    w.0
}

pub fn decode_database(buf: &[u8]) -> Result<Database> {
    let mut r = Reader::new(buf, DATABASE_MAGIC)?;
    let p = r.params()?;
    let base = BaseField::from_order(p.q)?;
    let x = r.mat_base(&base)?;
    r.finish()?;
    check_shape("database", (x.rows(), x.cols()), (p.l, p.query_rows()))?;
    Database::new(p, x)
}

/// Parameter header alone, as carried by `PARAMS_INFO`.
pub fn encode_params(p: &SchemeParams) -> Vec<u8> {
    let mut w = Writer(Vec::with_capacity(PARAMS_LEN));
    w.params(p);
    w.0
}

pub fn decode_params(buf: &[u8]) -> Result<SchemeParams> {
    let mut r = Reader { buf, pos: 0 };
    let p = r.params()?;
    r.finish()?;
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum FrameKind {
    Query = 1,
    Response = 2,
    Error = 3,
    ParamsProbe = 4,
    ParamsInfo = 5,
}

impl TryFrom<u8> for FrameKind {
    type Error = Error;

    fn try_from(b: u8) -> Result<Self> {
        Ok(match b {
            1 => FrameKind::Query,
            2 => FrameKind::Response,
            3 => FrameKind::Error,
            4 => FrameKind::ParamsProbe,
            5 => FrameKind::ParamsInfo,
            _ => return Err(Error::Malformed(format!("unknown frame kind {b}"))),
        })
    }
}

/// `length (u32) | kind (u8) | payload`; `length` counts payload bytes only.
pub fn write_frame<W: Write>(w: &mut W, kind: FrameKind, payload: &[u8]) -> io::Result<()> {
    let len = u32::try_from(payload.len())
        .ok()
        .filter(|&l| l <= MAX_FRAME_LEN)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "frame payload too large"))?;
    let mut head = [0u8; 5];
    head[..4].copy_from_slice(&len.to_le_bytes());
    head[4] = kind as u8;
    w.write_all(&head)?;
    w.write_all(payload)?;
    w.flush()
}

/// Reads one frame. `Ok(None)` on a clean end of stream before the header.
/// The kind byte is returned raw so the caller can answer unknown kinds.
pub fn read_frame<R: Read>(r: &mut R) -> io::Result<Option<(u8, Vec<u8>)>> {
    let mut head = [0u8; 5];
    let mut got = 0;
    while got < head.len() {
        match r.read(&mut head[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(io::ErrorKind::UnexpectedEof.into()),
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    let len = u32::from_le_bytes(head[..4].try_into().expect("4 bytes"));
    if len > MAX_FRAME_LEN {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "frame too large"));
    }
    let mut payload = vec![0u8; len as usize];
    r.read_exact(&mut payload)?;
    Ok(Some((head[4], payload)))
}

/// Registered error codes of the `ERROR` frame.
pub mod error_code {
    pub const DIMENSION_MISMATCH: u16 = 1;
    pub const BAD_MAGIC: u16 = 2;
    pub const UNSUPPORTED_VERSION: u16 = 3;
    pub const PARAM_MISMATCH: u16 = 4;
}

/// Malformed content and unknown frame kinds have no code of their own and
/// are reported as the closest registered one.
pub fn error_code_for(e: &Error) -> u16 {
    match e {
        Error::BadMagic => error_code::BAD_MAGIC,
        Error::UnsupportedVersion(_) => error_code::UNSUPPORTED_VERSION,
        Error::ParamMismatch(_) | Error::InvalidParams(_) => error_code::PARAM_MISMATCH,
        _ => error_code::DIMENSION_MISMATCH,
    }
}

pub fn encode_error(code: u16, message: &str) -> Vec<u8> {
    let mut out = code.to_le_bytes().to_vec();
    out.extend_from_slice(message.as_bytes());
    out
}

pub fn decode_error(payload: &[u8]) -> Result<(u16, String)> {
    if payload.len() < 2 {
        return Err(Error::dims("error frame shorter than its code"));
    }
    let code = u16::from_le_bytes([payload[0], payload[1]]);
    if !(1..=4).contains(&code) {
        return Err(Error::Malformed(format!("unregistered error code {code}")));
    }
    let message = String::from_utf8(payload[2..].to_vec())
        .map_err(|_| Error::Malformed("error message is not UTF-8".into()))?;
    Ok((code, message))
}

/// Answer to one request frame: the reply kind and payload.
fn handle(db: &Database, kind: u8, payload: &[u8]) -> (FrameKind, Vec<u8>) {
    let result = match FrameKind::try_from(kind) {
        Ok(FrameKind::Query) => {
            decode_query(payload).and_then(|q| respond(db, &q)).map(|a| (FrameKind::Response, encode_response(&a)))
        }
        Ok(FrameKind::ParamsProbe) => Ok((FrameKind::ParamsInfo, encode_params(db.params()))),
        Ok(other) => Err(Error::Malformed(format!("unexpected {other:?} frame from a client"))),
        Err(_) => Err(Error::BadMagic),
    };
    result.unwrap_or_else(|e| (FrameKind::Error, encode_error(error_code_for(&e), &e.to_string())))
}

fn serve_connection(db: &Database, mut stream: TcpStream) {
    // requests on one connection are answered strictly in order
    while let Ok(Some((kind, payload))) = read_frame(&mut stream) {
        let (reply, body) = handle(db, kind, &payload);
        if write_frame(&mut stream, reply, &body).is_err() {
            break;
        }
    }
    let _ = stream.shutdown(Shutdown::Both);
}

/// A running server; stops when [`ServerHandle::shutdown`] is called or the
/// handle is dropped.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.stop_now();
    }

    /// Blocks until the accept loop exits.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    fn stop_now(&mut self) {
        if let Some(t) = self.thread.take() {
            self.stop.store(true, Ordering::SeqCst);
            // wake the blocking accept
            let _ = TcpStream::connect(self.addr);
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_now();
    }
}

/// Binds `addr` and answers queries against `db`, one thread per
/// connection. Malformed requests get an `ERROR` frame; the server keeps
/// running.
pub fn serve<A: ToSocketAddrs>(db: Database, addr: A) -> Result<ServerHandle> {
    let listener = TcpListener::bind(addr).map_err(Error::ConnectionFailed)?;
    let addr = listener.local_addr()?;
    let db = Arc::new(db);
    let stop = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&stop);
    let thread = std::thread::spawn(move || {
        for stream in listener.incoming() {
            if flag.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let db = Arc::clone(&db);
            std::thread::spawn(move || serve_connection(&db, stream));
        }
    });
    Ok(ServerHandle { addr, stop, thread: Some(thread) })
}

/// One request/response exchange on a fresh connection.
fn exchange<A: ToSocketAddrs>(addr: A, kind: FrameKind, payload: &[u8]) -> Result<(FrameKind, Vec<u8>)> {
    let mut stream = TcpStream::connect(addr).map_err(Error::ConnectionFailed)?;
    write_frame(&mut stream, kind, payload).map_err(Error::ConnectionFailed)?;
    let (kind, body) = read_frame(&mut stream)
        .map_err(Error::ConnectionFailed)?
        .ok_or_else(|| Error::ConnectionFailed(io::ErrorKind::UnexpectedEof.into()))?;
    let kind = FrameKind::try_from(kind)?;
    if kind == FrameKind::Error {
        let (code, message) = decode_error(&body)?;
        return Err(Error::ServerError { code, message });
    }
    Ok((kind, body))
}

/// Sends `query` and returns the server's response.
pub fn fetch<A: ToSocketAddrs>(addr: A, query: &Query) -> Result<Response> {
    match exchange(addr, FrameKind::Query, &encode_query(query))? {
        (FrameKind::Response, body) => decode_response(&body),
        (k, _) => Err(Error::Malformed(format!("expected a response frame, got {k:?}"))),
    }
}

/// Asks the server for the parameters of its database.
pub fn probe_params<A: ToSocketAddrs>(addr: A) -> Result<SchemeParams> {
    match exchange(addr, FrameKind::ParamsProbe, &[])? {
        (FrameKind::ParamsInfo, body) => decode_params(&body),
        (k, _) => Err(Error::Malformed(format!("expected a params frame, got {k:?}"))),
    }
}
