//! LZ78 dictionary compression.
//!
//! Layout: a 4-byte big-endian original length, then a bit-packed (MSB-first)
//! sequence of phrases. Phrase `i` (counting from 0) is written as the index of
//! its longest dictionary prefix in `ceil(log2(i + 1))` bits followed by the
//! literal byte that extends it. Index 0 is the empty phrase. The last phrase
//! may repeat an existing dictionary entry when the input ends mid-match; the
//! decoder stops once the declared length is reached. Trailing padding bits
//! must be zero.

use std::collections::HashMap;

use crate::error::{Error, Result};

const HEADER_LEN: usize = 4;

fn index_width(phrase: usize) -> u32 {
    usize::BITS - phrase.leading_zeros()
}

struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    fn put(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 32);
        self.acc = (self.acc << width) | value;
        self.filled += width;
        while self.filled >= 8 {
            self.filled -= 8;
            self.out.push((self.acc >> self.filled) as u8);
        }
        self.acc &= (1u64 << self.filled) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push((self.acc << (8 - self.filled)) as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn remaining(&self) -> usize {
        self.data.len() * 8 - self.pos
    }

    fn take(&mut self, width: u32) -> Option<u64> {
        if (width as usize) > self.remaining() {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            let bit = (self.data[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | bit as u64;
            self.pos += 1;
        }
        Some(v)
    }
}

pub fn compress(payload: &[u8]) -> Vec<u8> {
    let len = u32::try_from(payload.len()).expect("payload larger than 4 GiB");
    let mut w = BitWriter {
        out: len.to_be_bytes().to_vec(),
        acc: 0,
        filled: 0,
    };

    let mut trie: HashMap<(u32, u8), u32> = HashMap::new();
    let mut phrases = 0usize;
    let mut node = 0u32;
    let mut parent = 0u32;
    let mut last = 0u8;
    for &byte in payload {
        match trie.get(&(node, byte)) {
            Some(&child) => {
                parent = node;
                last = byte;
                node = child;
            }
            None => {
                w.put(node as u64, index_width(phrases));
                w.put(byte as u64, 8);
                phrases += 1;
                trie.insert((node, byte), phrases as u32);
                node = 0;
            }
        }
    }
    if node != 0 {
        w.put(parent as u64, index_width(phrases));
        w.put(last as u64, 8);
    }
    w.finish()
}

pub fn decompress(stream: &[u8]) -> Result<Vec<u8>> {
    let header: [u8; HEADER_LEN] = stream
        .get(..HEADER_LEN)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| {
            Error::Decode(format!(
                "stream of {} bytes has no length header",
                stream.len()
            ))
        })?;
    let expected = u32::from_be_bytes(header) as usize;
    let mut r = BitReader {
        data: &stream[HEADER_LEN..],
        pos: 0,
    };

    let mut out: Vec<u8> = Vec::with_capacity(expected);
    // (offset, len) of each phrase within `out`; entry 0 is the empty phrase
    let mut dict: Vec<(usize, usize)> = vec![(0, 0)];
    while out.len() < expected {
        let phrase = dict.len() - 1;
        let index = r
            .take(index_width(phrase))
            .ok_or_else(|| Error::Decode(format!("truncated at phrase {phrase}")))?
            as usize;
        let byte = r
            .take(8)
            .ok_or_else(|| Error::Decode(format!("truncated literal at phrase {phrase}")))?
            as u8;
        let &(start, len) = dict.get(index).ok_or_else(|| {
            Error::Decode(format!("phrase {phrase} references unknown entry {index}"))
        })?;
        let offset = out.len();
        out.extend_from_within(start..start + len);
        out.push(byte);
        dict.push((offset, len + 1));
    }
    if out.len() != expected {
        return Err(Error::Decode(format!(
            "decoded {} bytes, header declares {expected}",
            out.len()
        )));
    }
    let rest = r.remaining();
    if rest >= 8 || r.take(rest as u32) != Some(0) {
        return Err(Error::Decode(format!(
            "{rest} trailing bits after final phrase"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_payload_is_header_only() {
        let c = compress(&[]);
        assert_eq!(c, vec![0, 0, 0, 0]);
        assert_eq!(decompress(&c).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn final_partial_phrase_round_trips() {
        for payload in [&b"aaa"[..], b"abab", b"aaaaaa", b"abcabcabcab"] {
            assert_eq!(decompress(&compress(payload)).unwrap(), payload);
        }
    }

    #[test]
    fn corrupted_streams_are_rejected() {
        let c = compress(b"hello hello hello hello");
        assert!(decompress(&c[..3]).is_err());
        assert!(decompress(&c[..c.len() - 2]).is_err());
        let mut extra = c.clone();
        extra.push(0xff);
        assert!(decompress(&extra).is_err());
        let mut longer = c.clone();
        longer[3] += 40;
        assert!(decompress(&longer).is_err());
        // phrase 2 has a 2-bit index; 3 is past the dictionary end
        let mut w = BitWriter {
            out: vec![0, 0, 0, 5],
            acc: 0,
            filled: 0,
        };
        w.put(b'a' as u64, 8);
        w.put(0, 1);
        w.put(b'b' as u64, 8);
        w.put(3, 2);
        w.put(b'c' as u64, 8);
        assert!(matches!(decompress(&w.finish()), Err(Error::Decode(_))));
    }

    proptest! {
        #[test]
        fn round_trip(payload in proptest::collection::vec(0u8..4, 0..2000)) {
            prop_assert_eq!(decompress(&compress(&payload)).unwrap(), payload);
        }
    }
}
