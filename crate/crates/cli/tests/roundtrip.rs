use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use sigma_nabla_cli::format::*;
use sigma_nabla_core::lfunction::CharPolyTable;
use sigma_nabla_core::{IntPolynomial, LaurentSeries, Matrix, PadicNumber, RingLabel, SigmaNablaModule};

const P: u64 = 5;

fn scalar() -> impl Strategy<Value = PadicNumber> {
    prop_oneof![
        Just(PadicNumber::zero(P)),
        (-5i64..=5).prop_map(|a| PadicNumber::zero_at(P, a)),
        (-4i64..=4, 1u64..10_000, 1u32..=20).prop_map(|(v, m, n)| PadicNumber::new(P, v, m, n)),
    ]
}

fn series() -> impl Strategy<Value = LaurentSeries> {
    (-6i64..=6, prop::collection::vec(scalar(), 0..6), any::<bool>(), prop::option::of(-3i64..=8))
        .prop_map(|(lo, c, exact, tail)| LaurentSeries::from_parts(P, lo, c, exact, tail, 256).unwrap())
}

fn module() -> impl Strategy<Value = SigmaNablaModule> {
    (1usize..=2).prop_flat_map(|n| {
        let m = || prop::collection::vec(series(), n * n).prop_map(move |v| Matrix::from_vec(n, n, v).unwrap());
        (m(), m(), prop::option::of(m()), prop::sample::select(RingLabel::all().to_vec()))
            .prop_map(|(phi, nn, b, ring)| SigmaNablaModule::new(ring, 25, phi, nn, b).unwrap())
    })
}

fn reparse<T: serde::Serialize + for<'de> serde::Deserialize<'de>>(doc: &T) -> T {
    parse_doc(&emit_doc(doc)).unwrap()
}

proptest! {
    #[test]
    fn scalars(x in scalar()) {
        prop_assert_eq!(scalar_from_doc(&reparse(&scalar_to_doc(&x)), P, 20).unwrap(), x);
    }

    #[test]
    fn series_documents(a in series()) {
        let back = series_from_doc(&reparse(&series_to_doc(&a)), P, 20, 256).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn module_documents(m in module()) {
        let back = module_from_doc(&reparse(&module_to_doc(&m)), 20, 256).unwrap();
        prop_assert_eq!(back.ring, m.ring);
        prop_assert_eq!(back.q, m.q);
        prop_assert_eq!(back.phi, m.phi);
        prop_assert_eq!(back.n, m.n);
        prop_assert_eq!(back.b, m.b);
    }

    #[test]
    fn rational_matrices(v in prop::collection::vec((-99i64..=99, 1i64..=50), 4)) {
        let m = Matrix::from_vec(2, 2, v.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect()).unwrap();
        let doc = rational_matrix_to_doc(&m);
        prop_assert_eq!(rational_matrix_from_doc(&reparse(&doc), "m").unwrap(), m);
    }

    #[test]
    fn tables(entries in prop::collection::vec((1u32..=3, prop::collection::vec(-9i64..=9, 2)), 1..5), big in any::<u64>()) {
        let mut points = vec![];
        let mut polys = BTreeMap::new();
        for (i, (d, c)) in entries.iter().enumerate() {
            let id = format!("pt{i}");
            points.push((id.clone(), *d));
            let mut coeffs = vec![BigInt::from(1), BigInt::from(c[0]), BigInt::from(c[1]) * BigInt::from(big) * BigInt::from(big) + 1];
            coeffs[1] *= BigInt::from(big);
            polys.insert(("v".to_string(), id), IntPolynomial::new(coeffs).compose_power(*d as usize));
        }
        let t = CharPolyTable::new(7, vec!["v".into()], points, polys).unwrap();
        prop_assert_eq!(table_from_doc(&reparse(&table_to_doc(&t))).unwrap(), t);
    }
}
