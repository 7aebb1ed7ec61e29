//! Property tests over the frame codec: round-trip identity, corruption
//! detection, hex composition, and encoding determinism.

use std::net::Ipv4Addr;

use proptest::prelude::*;

use secarp::wire::{
    decode_frame, encode_frame, frame_hex, parse_hex, ArpOp, Frame, FrameBody, MacAddr,
    SignedAuth, StdArp,
};

fn arb_mac() -> impl Strategy<Value = MacAddr> {
    any::<[u8; 6]>().prop_map(MacAddr)
}

fn arb_ip() -> impl Strategy<Value = Ipv4Addr> {
    any::<u32>().prop_map(Ipv4Addr::from)
}

fn arb_arp() -> impl Strategy<Value = StdArp> {
    (any::<bool>(), arb_mac(), arb_ip(), arb_mac(), arb_ip()).prop_map(
        |(request, sender_mac, sender_ip, target_mac, target_ip)| StdArp {
            op: if request { ArpOp::Request } else { ArpOp::Reply },
            sender_mac,
            sender_ip,
            target_mac,
            target_ip,
        },
    )
}

fn arb_signed_auth() -> impl Strategy<Value = SignedAuth> {
    (any::<[u8; 64]>(), prop::collection::vec(any::<u8>(), 0..256)).prop_map(
        |(signature, certificate)| SignedAuth {
            signature,
            certificate,
        },
    )
}

fn arb_body() -> impl Strategy<Value = FrameBody> {
    prop_oneof![
        (arb_ip(), arb_mac(), any::<[u8; 32]>())
            .prop_map(|(ip, mac, tag)| FrameBody::IpSend { ip, mac, tag }),
        (arb_ip(), arb_mac(), any::<bool>(), any::<[u8; 32]>())
            .prop_map(|(ip, mac, ack, tag)| FrameBody::IpReply { ip, mac, ack, tag }),
        (arb_ip(), arb_signed_auth()).prop_map(|(ip, auth)| FrameBody::ArpCheck { ip, auth }),
        (arb_ip(), arb_signed_auth()).prop_map(|(ip, auth)| FrameBody::ArpNoChange { ip, auth }),
        (arb_ip(), arb_signed_auth()).prop_map(|(ip, auth)| FrameBody::ArpAck { ip, auth }),
        (arb_arp(), arb_signed_auth())
            .prop_map(|(arp, auth)| FrameBody::SignedArpReply { arp, auth }),
        arb_arp().prop_map(FrameBody::StdArp),
    ]
}

fn arb_frame() -> impl Strategy<Value = Frame> {
    (arb_mac(), arb_mac(), arb_body()).prop_map(|(dest, src, body)| Frame { dest, src, body })
}

proptest! {
    #[test]
    fn round_trip_identity(frame in arb_frame()) {
        let bytes = encode_frame(&frame);
        prop_assert_eq!(decode_frame(&bytes).unwrap(), frame);
    }

    #[test]
    fn encoding_is_deterministic(frame in arb_frame()) {
        prop_assert_eq!(encode_frame(&frame), encode_frame(&frame.clone()));
    }

    #[test]
    fn hex_text_composes_with_the_codec(frame in arb_frame()) {
        let hex = frame_hex(&frame);
        let bytes = parse_hex(&hex).unwrap();
        prop_assert_eq!(decode_frame(&bytes).unwrap(), frame);
    }

    #[test]
    fn parse_hex_ignores_whitespace(frame in arb_frame(), split in 1usize..40) {
        let hex = frame_hex(&frame);
        let spaced: String = hex
            .as_bytes()
            .chunks(split)
            .map(|c| std::str::from_utf8(c).unwrap())
            .collect::<Vec<_>>()
            .join(" \n\t");
        prop_assert_eq!(parse_hex(&spaced).unwrap(), parse_hex(&hex).unwrap());
    }

    #[test]
    fn any_single_byte_corruption_is_rejected(
        frame in arb_frame(),
        position_pick in any::<prop::sample::Index>(),
        xor in 1u8..=255,
    ) {
        let mut bytes = encode_frame(&frame);
        let position = position_pick.index(bytes.len());
        bytes[position] ^= xor;
        prop_assert!(decode_frame(&bytes).is_err(), "corruption at byte {position} accepted");
    }

    #[test]
    fn truncations_are_rejected(frame in arb_frame(), keep_pick in any::<prop::sample::Index>()) {
        let bytes = encode_frame(&frame);
        let keep = keep_pick.index(bytes.len()); // strictly shorter than full
        prop_assert!(decode_frame(&bytes[..keep]).is_err());
    }
}
