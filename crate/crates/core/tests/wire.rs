use std::io::Write;
use std::net::TcpStream;

use cpir_core::pir::{build_query, build_query_seeded, decode, respond, Database, SchemeParams};
use cpir_core::wire::{self, error_code, FrameKind};
use cpir_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> SchemeParams {
    SchemeParams::new(4, 4, 2, 10, 5, 3, 8).unwrap()
}

fn small_params() -> impl Strategy<Value = SchemeParams> {
    (1u32..=8, 2usize..=5, 2usize..=7, 1usize..=3, 1usize..=4)
        .prop_flat_map(|(w, s, n, m, l)| (Just((w, s, n, m, l)), 1..s, 1..n))
        .prop_map(|((w, s, n, m, l), v, k)| SchemeParams::new(1 << w, s, v, n, k, m, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_format_round_trips(p in small_params(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let index = (seed as usize) % p.m;
        let db = Database::random(p, &mut rng).unwrap();
        let (q, sec) = build_query(&p, index, &mut rng).unwrap();
        let a = respond(&db, &q).unwrap();

        let qb = wire::encode_query(&q);
        prop_assert_eq!(qb.len(), wire::query_header_len(p.s) + wire::query_payload_len(&p));
        prop_assert_eq!(&wire::decode_query(&qb).unwrap(), &q);
        prop_assert_eq!(&wire::decode_response(&wire::encode_response(&a)).unwrap(), &a);
        prop_assert_eq!(&wire::decode_secret(&wire::encode_secret(&sec)).unwrap(), &sec);
        prop_assert_eq!(&wire::decode_database(&wire::encode_database(&db)).unwrap(), &db);
        prop_assert_eq!(wire::decode_params(&wire::encode_params(&p)).unwrap(), p);
    }

    #[test]
    fn truncation_is_a_dimension_error(cut in 1usize..200) {
        let (q, _) = build_query_seeded(&params(), 0, 1).unwrap();
        let bytes = wire::encode_query(&q);
        let keep = bytes.len().saturating_sub(cut).max(8);
        prop_assert!(matches!(wire::decode_query(&bytes[..keep]), Err(Error::DimensionMismatch(_)) | Err(Error::Malformed(_))));
    }

    #[test]
    fn frames_round_trip(kind in 1u8..=5, payload in proptest::collection::vec(any::<u8>(), 0..300)) {
        let mut buf = Vec::new();
        let k = FrameKind::try_from(kind).unwrap();
        wire::write_frame(&mut buf, k, &payload).unwrap();
        prop_assert_eq!(buf.len(), 5 + payload.len());
        let (got_kind, got) = wire::read_frame(&mut &buf[..]).unwrap().unwrap();
        prop_assert_eq!(got_kind, kind);
        prop_assert_eq!(got, payload);
    }
}

#[test]
fn loopback_matches_local_response() {
    let p = params();
    let db = Database::random(p, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let server = wire::serve(db.clone(), "127.0.0.1:0").unwrap();
    let addr = server.local_addr();
    assert_eq!(wire::probe_params(addr).unwrap(), p);
    for i in 0..p.m {
        let (q, sec) = build_query_seeded(&p, i, 10 + i as u64).unwrap();
        let remote = wire::fetch(addr, &q).unwrap();
        assert_eq!(remote, respond(&db, &q).unwrap());
        assert_eq!(decode(&remote, &sec).unwrap(), db.file(i).unwrap());
    }
    server.shutdown();
}

#[test]
fn server_reports_errors_and_keeps_serving() {
    let p = params();
    let db = Database::random(p, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let server = wire::serve(db.clone(), "127.0.0.1:0").unwrap();
    let addr = server.local_addr();

    // different m: m·δ no longer matches the database
    let wrong_m = SchemeParams { m: 2, ..p };
    let (q, _) = build_query_seeded(&wrong_m, 0, 4).unwrap();
    match wire::fetch(addr, &q) {
        Err(Error::ServerError { code, .. }) => assert_eq!(code, error_code::DIMENSION_MISMATCH),
        other => panic!("expected a server error, got {other:?}"),
    }

    // different q
    let wrong_q = SchemeParams { q: 2, ..p };
    let (q, _) = build_query_seeded(&wrong_q, 0, 5).unwrap();
    match wire::fetch(addr, &q) {
        Err(Error::ServerError { code, .. }) => assert_eq!(code, error_code::PARAM_MISMATCH),
        other => panic!("expected a server error, got {other:?}"),
    }

    // garbage and a bad version on one raw connection, answered in order
    let mut stream = TcpStream::connect(addr).unwrap();
    wire::write_frame(&mut stream, FrameKind::Query, b"not a query").unwrap();
    let (good, _) = build_query_seeded(&p, 1, 6).unwrap();
    let mut v2 = wire::encode_query(&good);
    v2[7] = 2;
    wire::write_frame(&mut stream, FrameKind::Query, &v2).unwrap();
    stream.write_all(&[0, 0, 0, 0, 42]).unwrap();
    for want in [error_code::BAD_MAGIC, error_code::UNSUPPORTED_VERSION, error_code::BAD_MAGIC] {
        let (kind, body) = wire::read_frame(&mut stream).unwrap().unwrap();
        assert_eq!(kind, FrameKind::Error as u8);
        assert_eq!(wire::decode_error(&body).unwrap().0, want);
    }
    drop(stream);

    assert_eq!(wire::fetch(addr, &good).unwrap(), respond(&db, &good).unwrap());
    server.shutdown();
}

#[test]
fn identical_queries_get_identical_responses() {
    let p = params();
    let db = Database::random(p, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let server = wire::serve(db, "127.0.0.1:0").unwrap();
    let (q, _) = build_query_seeded(&p, 2, 8).unwrap();
    let a = wire::fetch(server.local_addr(), &q).unwrap();
    let b = wire::fetch(server.local_addr(), &q).unwrap();
    assert_eq!(wire::encode_response(&a), wire::encode_response(&b));
}

#[test]
fn unreachable_server_is_connection_failure() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let (q, _) = build_query_seeded(&params(), 0, 9).unwrap();
    assert!(matches!(wire::fetch(addr, &q), Err(Error::ConnectionFailed(_))));
}
