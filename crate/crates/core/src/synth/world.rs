//! Fixed vocabulary of the synthetic shopping world.

pub struct ProductType {
    pub cid: &'static str,
    pub word: &'static str,
    pub modifiers: &'static [&'static str],
    pub suffixes: &'static [&'static str],
    pub points: &'static [&'static str],
}

pub struct Topic {
    pub id: &'static str,
    pub types: &'static [ProductType],
    /// Curated bundles as indices into `types`, with relative frequency.
    pub bundles: &'static [(&'static [usize], u32)],
    pub openers: &'static [&'static str],
    pub closings: &'static [&'static str],
}

pub const CONNECTORS: &[&str] = &["，搭配", "，再配上", "，加上", "，配一个"];
pub const STYLES: &[&str] = &["北欧", "简约", "轻奢", "现代", "日式", "复古"];
pub const COLORS: &[&str] = &["白色", "灰色", "黑色", "原木色", "米色", "蓝色"];

/// Phrases for copy that never names the products.
pub const VAGUE: &[&str] = &[
    "在繁忙的工作中，有这么一小片恬静的空间，带走城市的喧嚣。",
    "生活需要一点仪式感，从今天开始好好爱自己。",
    "忙碌了一天，回到家就想放松一下，享受片刻的宁静。",
    "好物值得分享，幸福其实很简单。",
];

/// (text inserted into copy, replacement the lexicon maps it to).
pub const ALTERABLE: &[(&str, &str)] = &[
    ("最好", "很好"),
    ("顶级", "高端"),
    ("秒杀", "特惠"),
    ("第一", "一流"),
];
pub const FORBIDDEN: &[&str] = &[
    "再加99元享",
    "再加199元送",
    "全网最低价",
    "假一赔十",
    "国家级品质",
];

pub const TOPICS: &[Topic] = &[
    Topic {
        id: "living_room",
        types: &[
            ProductType {
                cid: "c101",
                word: "沙发",
                modifiers: &["真皮", "布艺", "科技布", "懒人", "实木框架", "羽绒"],
                suffixes: &["三人位", "双人位", "转角", "组合", ""],
                points: &["柔软舒适", "坐感饱满", "久坐不累", "承托有力"],
            },
            ProductType {
                cid: "c102",
                word: "茶几",
                modifiers: &["玻璃", "实木", "岩板", "圆形", "伸缩", "大理石"],
                suffixes: &["小户型", "带收纳", "家用", ""],
                points: &["桌面耐磨", "收纳充足", "线条简洁", "稳固不晃"],
            },
            ProductType {
                cid: "c103",
                word: "落地灯",
                modifiers: &["护眼", "钓鱼", "极简", "遥控", "立式"],
                suffixes: &["卧室客厅", "床头", ""],
                points: &["光线柔和", "氛围满满", "亮度可调"],
            },
            ProductType {
                cid: "c104",
                word: "地毯",
                modifiers: &["羊毛", "短绒", "可机洗", "仿羊绒", "丝毛"],
                suffixes: &["大面积", "客厅", ""],
                points: &["脚感柔软", "防滑耐脏", "花纹雅致"],
            },
            ProductType {
                cid: "c105",
                word: "抱枕",
                modifiers: &["棉麻", "天鹅绒", "卡通", "绣花", "几何"],
                suffixes: &["靠垫", "含芯", ""],
                points: &["靠着舒服", "点缀空间", "回弹饱满"],
            },
            ProductType {
                cid: "c106",
                word: "电视柜",
                modifiers: &["实木", "悬空", "岩板", "伸缩", "烤漆"],
                suffixes: &["地柜", "小户型", ""],
                points: &["收纳能力强", "安装简单", "台面宽敞"],
            },
        ],
        bundles: &[
            (&[0, 1], 8),
            (&[0, 4], 3),
            (&[1, 3], 3),
            (&[0, 2], 2),
            (&[5, 1], 2),
            (&[0, 1, 3], 1),
        ],
        openers: &[
            "周末窝在客厅，",
            "想要一个温馨的客厅，",
            "给客厅换个新面貌，",
            "一家人的客厅时光，",
        ],
        closings: &["让家更有格调。", "客厅从此更惬意。", "打造舒适的会客空间。"],
    },
    Topic {
        id: "kitchen",
        types: &[
            ProductType {
                cid: "c201",
                word: "净水器",
                modifiers: &["厨下", "矽藻陶瓷", "反渗透", "直饮", "超滤"],
                suffixes: &["家用", "大通量", ""],
                points: &["过滤杂质", "出水清甜", "饮水安全"],
            },
            ProductType {
                cid: "c202",
                word: "空气炸锅",
                modifiers: &["智能", "超大容量", "可视", "无油", "多功能"],
                suffixes: &["家用", "新款", ""],
                points: &["少油健康", "外酥里嫩", "一键烹饪"],
            },
            ProductType {
                cid: "c203",
                word: "电饭煲",
                modifiers: &["智能", "迷你", "球釜", "预约", "柴火"],
                suffixes: &["家用", "小型", ""],
                points: &["米饭香软", "一键预约", "受热均匀"],
            },
            ProductType {
                cid: "c204",
                word: "炒锅",
                modifiers: &["不粘", "铸铁", "麦饭石", "精铁", "少油烟"],
                suffixes: &["平底", "燃气灶适用", ""],
                points: &["导热迅速", "翻炒轻松", "不易粘锅"],
            },
            ProductType {
                cid: "c205",
                word: "刀具",
                modifiers: &["不锈钢", "大马士革", "锻打", "厨师"],
                suffixes: &["套装", "家用", ""],
                points: &["锋利耐用", "切菜省力", "握感舒适"],
            },
            ProductType {
                cid: "c206",
                word: "砧板",
                modifiers: &["竹制", "乌檀木", "抗菌", "双面", "加厚"],
                suffixes: &["家用", "案板", ""],
                points: &["厚实稳固", "易清洗", "不易开裂"],
            },
        ],
        bundles: &[
            (&[4, 5], 8),
            (&[0, 2], 3),
            (&[1, 3], 3),
            (&[3, 4], 2),
            (&[2, 3], 2),
            (&[3, 4, 5], 1),
        ],
        openers: &[
            "下班回家做顿饭，",
            "厨房是家的温度，",
            "爱做饭的你，",
            "给厨房添点新装备，",
        ],
        closings: &["健康好物，美好生活！", "下厨更轻松。", "让烹饪成为享受。"],
    },
    Topic {
        id: "digital",
        types: &[
            ProductType {
                cid: "c301",
                word: "手机",
                modifiers: &["5G", "拍照", "轻薄", "游戏", "大屏"],
                suffixes: &["旗舰", "新款", ""],
                points: &["运行流畅", "拍照清晰", "续航给力"],
            },
            ProductType {
                cid: "c302",
                word: "手机壳",
                modifiers: &["防摔", "硅胶", "透明", "磁吸", "全包"],
                suffixes: &["保护套", "新款", ""],
                points: &["贴合机身", "手感细腻", "防摔耐磨"],
            },
            ProductType {
                cid: "c303",
                word: "耳机",
                modifiers: &["蓝牙", "降噪", "无线", "运动", "入耳式"],
                suffixes: &["长续航", "新款", ""],
                points: &["音质清晰", "佩戴舒适", "连接稳定"],
            },
            ProductType {
                cid: "c304",
                word: "充电器",
                modifiers: &["快充", "氮化镓", "多口", "折叠"],
                suffixes: &["套装", "便携", ""],
                points: &["充电快速", "小巧便携", "发热更低"],
            },
            ProductType {
                cid: "c305",
                word: "平板",
                modifiers: &["学习", "办公", "高刷", "护眼"],
                suffixes: &["电脑", "新款", ""],
                points: &["屏幕细腻", "续航持久", "多任务流畅"],
            },
            ProductType {
                cid: "c306",
                word: "键盘",
                modifiers: &["机械", "无线", "静音", "蓝牙", "背光"],
                suffixes: &["办公", "游戏", ""],
                points: &["手感清脆", "打字顺手", "按键灵敏"],
            },
        ],
        bundles: &[
            (&[0, 1], 8),
            (&[0, 2], 3),
            (&[0, 3], 3),
            (&[4, 5], 2),
            (&[2, 3], 2),
            (&[0, 1, 2], 1),
        ],
        openers: &[
            "数码控看过来，",
            "出门通勤必备，",
            "换新设备的好时机，",
            "科技改变生活，",
        ],
        closings: &["数码生活更便捷。", "效率翻倍。", "玩出新花样。"],
    },
    Topic {
        id: "bedroom",
        types: &[
            ProductType {
                cid: "c401",
                word: "床垫",
                modifiers: &["乳胶", "独立弹簧", "椰棕", "记忆棉"],
                suffixes: &["双人", "加厚", ""],
                points: &["贴合身体", "睡感安稳", "支撑均匀"],
            },
            ProductType {
                cid: "c402",
                word: "枕头",
                modifiers: &["乳胶", "荞麦", "护颈", "记忆棉", "羽丝绒"],
                suffixes: &["一对", "单人", ""],
                points: &["支撑颈椎", "透气不闷", "柔软回弹"],
            },
            ProductType {
                cid: "c403",
                word: "四件套",
                modifiers: &["纯棉", "磨毛", "天丝", "水洗棉", "刺绣"],
                suffixes: &["床上用品", "简约", ""],
                points: &["亲肤透气", "色彩柔和", "不易起球"],
            },
            ProductType {
                cid: "c404",
                word: "衣柜",
                modifiers: &["实木", "推拉门", "简易", "组合", "平开门"],
                suffixes: &["家用", "大容量", ""],
                points: &["空间利用率高", "收纳整齐", "结构牢固"],
            },
            ProductType {
                cid: "c405",
                word: "台灯",
                modifiers: &["护眼", "充电", "触控", "折叠", "学习"],
                suffixes: &["书桌", "宿舍", ""],
                points: &["无频闪", "光线均匀", "亮度可调"],
            },
            ProductType {
                cid: "c406",
                word: "床头柜",
                modifiers: &["实木", "带抽屉", "轻奢", "迷你", "悬浮"],
                suffixes: &["卧室", "简约", ""],
                points: &["小巧实用", "随手收纳", "做工精细"],
            },
        ],
        bundles: &[
            (&[0, 1], 8),
            (&[2, 1], 3),
            (&[5, 4], 3),
            (&[0, 2], 2),
            (&[3, 5], 2),
            (&[0, 1, 2], 1),
        ],
        openers: &[
            "好睡眠从卧室开始，",
            "一夜好眠，",
            "打造理想卧室，",
            "给自己一个安心的角落，",
        ],
        closings: &["每天醒来都精神饱满。", "睡个好觉。", "卧室也能很有品位。"],
    },
    Topic {
        id: "outdoor",
        types: &[
            ProductType {
                cid: "c501",
                word: "跑鞋",
                modifiers: &["缓震", "透气", "轻便", "专业", "碳板"],
                suffixes: &["男女款", "运动", ""],
                points: &["回弹有力", "跑步不累", "抓地稳定"],
            },
            ProductType {
                cid: "c502",
                word: "运动服",
                modifiers: &["速干", "宽松", "紧身", "吸汗", "冰丝"],
                suffixes: &["套装", "健身", ""],
                points: &["穿着清爽", "活动自如", "排汗迅速"],
            },
            ProductType {
                cid: "c503",
                word: "瑜伽垫",
                modifiers: &["加厚", "防滑", "环保", "折叠", "加宽"],
                suffixes: &["健身", "家用", ""],
                points: &["回弹稳定", "不易变形", "贴地不滑"],
            },
            ProductType {
                cid: "c504",
                word: "水杯",
                modifiers: &["运动", "大容量", "保温", "便携", "吸管"],
                suffixes: &["户外", "学生", ""],
                points: &["随时补水", "密封不漏", "轻巧耐摔"],
            },
            ProductType {
                cid: "c505",
                word: "背包",
                modifiers: &["双肩", "防水", "登山", "轻量", "大容量"],
                suffixes: &["户外", "旅行", ""],
                points: &["背负舒适", "容量充足", "分区合理"],
            },
            ProductType {
                cid: "c506",
                word: "帐篷",
                modifiers: &["自动", "双人", "防雨", "露营", "速开"],
                suffixes: &["户外", "野营", ""],
                points: &["搭建方便", "遮阳挡雨", "通风透气"],
            },
        ],
        bundles: &[
            (&[0, 1], 8),
            (&[2, 1], 3),
            (&[3, 4], 3),
            (&[5, 4], 2),
            (&[0, 3], 2),
            (&[0, 1, 3], 1),
        ],
        openers: &[
            "动起来更健康，",
            "周末去户外，",
            "运动达人的选择，",
            "出发吧，",
        ],
        closings: &["享受运动的快乐。", "自在每一刻。", "让汗水更有价值。"],
    },
];
