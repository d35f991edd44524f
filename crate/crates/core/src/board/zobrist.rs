use std::sync::OnceLock;

pub(crate) struct Keys {
    pub piece: [[[u64; 64]; 6]; 2],
    pub castling: [u64; 16],
    pub en_passant: [u64; 8],
    pub side: u64,
    pub castled: [u64; 2],
}

pub(crate) fn keys() -> &'static Keys {
    static KEYS: OnceLock<Keys> = OnceLock::new();
    KEYS.get_or_init(|| {
        // splitmix64 with a fixed seed, so keys are identical across runs and builds.
        let mut state = 0x5EED_C0DE_2008_0001u64;
        let mut next = || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        let mut k = Keys {
            piece: [[[0; 64]; 6]; 2],
            castling: [0; 16],
            en_passant: [0; 8],
            side: 0,
            castled: [0; 2],
        };
        for color in k.piece.iter_mut() {
            for kind in color.iter_mut() {
                for sq in kind.iter_mut() {
                    *sq = next();
                }
            }
        }
        // Castling keys are composed from four per-right keys so that any
        // combination of rights hashes consistently.
        let rights = [next(), next(), next(), next()];
        for (bits, key) in k.castling.iter_mut().enumerate() {
            *key = (0..4).filter(|i| bits & (1 << i) != 0).fold(0, |acc, i| acc ^ rights[i]);
        }
        for f in k.en_passant.iter_mut() {
            *f = next();
        }
        k.side = next();
        k.castled = [next(), next()];
        k
    })
}
