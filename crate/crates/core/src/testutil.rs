//! Small hand-built fixtures shared by unit tests.

use crate::catalog::{
    train_product_word_model, Catalog, Combination, Product, ProductWord, ProductWordConfig,
    ProductWordModel, Provenance,
};

pub fn product(id: &str, title: &str, cid: &str, topic: &str, word: &str) -> Product {
    Product {
        id: id.into(),
        title: title.into(),
        attributes: Default::default(),
        cid: cid.into(),
        topic: Some(topic.into()),
        product_words: vec![ProductWord::new(word, 1.0)],
    }
}

/// Two living-room types and two digital types, with gold words attached.
pub fn small_catalog() -> Catalog {
    Catalog::new(vec![
        product("s1", "leather sofa", "11", "living", "sofa"),
        product("s2", "fabric sofa", "11", "living", "sofa"),
        product("t1", "glass coffee table", "12", "living", "coffee table"),
        product("t2", "oak coffee table", "12", "living", "coffee table"),
        product("ph1", "smart phone pro", "21", "digital", "phone"),
        product("e1", "wireless earphones", "22", "digital", "earphones"),
    ])
    .unwrap()
}

pub fn word_model(catalog: &Catalog) -> ProductWordModel {
    let labeled: Vec<_> = catalog
        .products()
        .iter()
        .map(|p| {
            (
                p.clone(),
                p.product_words.iter().map(|w| w.word.clone()).collect(),
            )
        })
        .collect();
    train_product_word_model(&labeled, ProductWordConfig::default()).unwrap()
}

pub fn combo(ids: &[&str], topic: &str) -> Combination {
    Combination::new(
        ids.iter().map(|s| s.to_string()).collect(),
        topic,
        Provenance::Dataset,
    )
}

pub const SOFA_ORIGINAL: &str =
    "在繁忙的工作中，有这么一小片恬静的空间，带走城市的喧嚣，留下一地的静谧。";
pub const SOFA_GENERATED: &str =
    "城市工作的人们，面临城市的喧嚣，激烈的工作环境，让自己不放松。选择简约的皮艺沙发，搭配简约玻璃茶几组合，让家具有时尚的魅力。";
pub const FILTER_ORIGINAL: &str = "再加99元享超大容量空气炸锅。";
pub const FILTER_GENERATED: &str =
    "易开得矽藻陶瓷净水器，滤除水中杂质，饮水安全，搭配空气炸锅，健康好物，美好生活！";

/// Han-script catalog holding the products of both worked examples.
pub fn table2_catalog() -> Catalog {
    let mut fryer = product("k2", "超大容量空气炸锅", "1202", "kitchen", "空气炸锅");
    fryer.attributes.insert("容量".into(), "超大容量".into());
    Catalog::new(vec![
        product("l1", "真皮沙发", "1101", "living", "沙发"),
        product("l2", "布艺沙发三人位", "1101", "living", "沙发"),
        product("l3", "玻璃茶几", "1102", "living", "茶几"),
        product("l4", "实木茶几小户型", "1102", "living", "茶几"),
        product("l5", "北欧落地灯", "1103", "living", "落地灯"),
        product("k1", "矽藻陶瓷净水器", "1201", "kitchen", "净水器"),
        product("k3", "家用厨下净水器", "1201", "kitchen", "净水器"),
        fryer,
        product("k4", "智能空气炸锅家用", "1202", "kitchen", "空气炸锅"),
    ])
    .unwrap()
}
