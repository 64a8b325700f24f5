#!/usr/bin/env python3
"""Regenerate the synthetic survey fixtures under data/.

The real WVS questionnaires and response tables are not redistributable, so the
repository ships a synthetic stand-in with the same numbering scheme, file
layout and question-filter structure. Everything is deterministic (fixed seed).

    python3 scripts/gen_fixtures.py
"""

import csv
import json
import math
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
LANGS = ["En", "De", "Es", "Ja", "Ko", "Pt", "Ru", "Vi", "Zh"]
LANG_NAMES = {
    "En": "English", "De": "German", "Es": "Spanish", "Ja": "Japanese", "Ko": "Korean",
    "Pt": "Portuguese", "Ru": "Russian", "Vi": "Vietnamese", "Zh": "Chinese",
}

# ---------------------------------------------------------------------------
# Option scales: per language label lists. "10pt" scales have text endpoints
# and bare digits in between.
# ---------------------------------------------------------------------------
SCALES = {
    "imp4": {
        "En": ["Very important", "Rather important", "Not very important", "Not at all important"],
        "De": ["Sehr wichtig", "Ziemlich wichtig", "Nicht sehr wichtig", "Überhaupt nicht wichtig"],
        "Es": ["Muy importante", "Bastante importante", "No muy importante", "Nada importante"],
        "Ja": ["非常に重要", "やや重要", "あまり重要でない", "まったく重要でない"],
        "Ko": ["매우 중요하다", "어느 정도 중요하다", "별로 중요하지 않다", "전혀 중요하지 않다"],
        "Pt": ["Muito importante", "Bastante importante", "Pouco importante", "Nada importante"],
        "Ru": ["Очень важно", "Довольно важно", "Не очень важно", "Совсем не важно"],
        "Vi": ["Rất quan trọng", "Khá quan trọng", "Không quan trọng lắm", "Hoàn toàn không quan trọng"],
        "Zh": ["非常重要", "比较重要", "不太重要", "一点也不重要"],
    },
    "mention2": {
        "En": ["Mentioned", "Not mentioned"], "De": ["Genannt", "Nicht genannt"],
        "Es": ["Mencionado", "No mencionado"], "Ja": ["挙げた", "挙げなかった"],
        "Ko": ["언급함", "언급하지 않음"], "Pt": ["Mencionado", "Não mencionado"],
        "Ru": ["Упомянуто", "Не упомянуто"], "Vi": ["Có nhắc đến", "Không nhắc đến"],
        "Zh": ["提及", "未提及"],
    },
    "agree4": {
        "En": ["Strongly agree", "Agree", "Disagree", "Strongly disagree"],
        "De": ["Stimme voll und ganz zu", "Stimme zu", "Stimme nicht zu", "Stimme überhaupt nicht zu"],
        "Es": ["Muy de acuerdo", "De acuerdo", "En desacuerdo", "Muy en desacuerdo"],
        "Ja": ["強くそう思う", "そう思う", "そう思わない", "まったくそう思わない"],
        "Ko": ["매우 동의한다", "동의한다", "동의하지 않는다", "전혀 동의하지 않는다"],
        "Pt": ["Concordo totalmente", "Concordo", "Discordo", "Discordo totalmente"],
        "Ru": ["Полностью согласен", "Согласен", "Не согласен", "Совершенно не согласен"],
        "Vi": ["Rất đồng ý", "Đồng ý", "Không đồng ý", "Rất không đồng ý"],
        "Zh": ["非常同意", "同意", "不同意", "非常不同意"],
    },
    "agree5": {
        "En": ["Strongly agree", "Agree", "Neither agree nor disagree", "Disagree", "Strongly disagree"],
        "De": ["Stimme voll und ganz zu", "Stimme zu", "Weder noch", "Stimme nicht zu", "Stimme überhaupt nicht zu"],
        "Es": ["Muy de acuerdo", "De acuerdo", "Ni de acuerdo ni en desacuerdo", "En desacuerdo", "Muy en desacuerdo"],
        "Ja": ["強くそう思う", "そう思う", "どちらともいえない", "そう思わない", "まったくそう思わない"],
        "Ko": ["매우 동의한다", "동의한다", "동의하지도 반대하지도 않는다", "동의하지 않는다", "전혀 동의하지 않는다"],
        "Pt": ["Concordo totalmente", "Concordo", "Nem concordo nem discordo", "Discordo", "Discordo totalmente"],
        "Ru": ["Полностью согласен", "Согласен", "Ни то ни другое", "Не согласен", "Совершенно не согласен"],
        "Vi": ["Rất đồng ý", "Đồng ý", "Không đồng ý cũng không phản đối", "Không đồng ý", "Rất không đồng ý"],
        "Zh": ["非常同意", "同意", "既不同意也不反对", "不同意", "非常不同意"],
    },
    "agree3": {
        "En": ["Agree", "Hard to say", "Disagree"], "De": ["Stimme zu", "Schwer zu sagen", "Stimme nicht zu"],
        "Es": ["De acuerdo", "Difícil de decir", "En desacuerdo"], "Ja": ["そう思う", "どちらともいえない", "そう思わない"],
        "Ko": ["동의한다", "말하기 어렵다", "동의하지 않는다"], "Pt": ["Concordo", "Difícil dizer", "Discordo"],
        "Ru": ["Согласен", "Трудно сказать", "Не согласен"], "Vi": ["Đồng ý", "Khó nói", "Không đồng ý"],
        "Zh": ["同意", "很难说", "不同意"],
    },
    "trust4": {
        "En": ["Trust completely", "Trust somewhat", "Do not trust very much", "Do not trust at all"],
        "De": ["Vertraue voll und ganz", "Vertraue etwas", "Vertraue nicht sehr", "Vertraue überhaupt nicht"],
        "Es": ["Confía totalmente", "Confía algo", "No confía mucho", "No confía nada"],
        "Ja": ["完全に信頼する", "ある程度信頼する", "あまり信頼しない", "まったく信頼しない"],
        "Ko": ["완전히 신뢰한다", "어느 정도 신뢰한다", "별로 신뢰하지 않는다", "전혀 신뢰하지 않는다"],
        "Pt": ["Confia totalmente", "Confia um pouco", "Não confia muito", "Não confia nada"],
        "Ru": ["Полностью доверяю", "Скорее доверяю", "Скорее не доверяю", "Совсем не доверяю"],
        "Vi": ["Hoàn toàn tin tưởng", "Khá tin tưởng", "Không tin tưởng lắm", "Hoàn toàn không tin tưởng"],
        "Zh": ["完全信任", "比较信任", "不太信任", "完全不信任"],
    },
    "conf4": {
        "En": ["A great deal", "Quite a lot", "Not very much", "None at all"],
        "De": ["Sehr viel", "Ziemlich viel", "Nicht sehr viel", "Überhaupt keins"],
        "Es": ["Mucha", "Bastante", "No mucha", "Ninguna"],
        "Ja": ["非常に信頼している", "やや信頼している", "あまり信頼していない", "まったく信頼していない"],
        "Ko": ["매우 많이", "상당히", "별로", "전혀"],
        "Pt": ["Muita", "Bastante", "Pouca", "Nenhuma"],
        "Ru": ["Полностью", "В значительной степени", "Не очень", "Совсем нет"],
        "Vi": ["Rất nhiều", "Khá nhiều", "Không nhiều lắm", "Hoàn toàn không"],
        "Zh": ["很大信心", "较大信心", "不太有信心", "完全没有信心"],
    },
    "yesno2": {
        "En": ["Yes", "No"], "De": ["Ja", "Nein"], "Es": ["Sí", "No"], "Ja": ["はい", "いいえ"],
        "Ko": ["예", "아니요"], "Pt": ["Sim", "Não"], "Ru": ["Да", "Нет"], "Vi": ["Có", "Không"],
        "Zh": ["是", "否"],
    },
    "scale10": {
        "En": ["Not at all", "Completely"], "De": ["Überhaupt nicht", "Voll und ganz"],
        "Es": ["Nada en absoluto", "Completamente"], "Ja": ["まったくそうではない", "完全にそうだ"],
        "Ko": ["전혀 아니다", "완전히 그렇다"], "Pt": ["De modo nenhum", "Completamente"],
        "Ru": ["Совсем нет", "Полностью"], "Vi": ["Hoàn toàn không", "Hoàn toàn có"],
        "Zh": ["完全不是", "完全是"],
    },
    "just10": {
        "En": ["Never justifiable", "Always justifiable"], "De": ["Nie gerechtfertigt", "Immer gerechtfertigt"],
        "Es": ["Nunca se justifica", "Siempre se justifica"], "Ja": ["決して正当化できない", "常に正当化できる"],
        "Ko": ["결코 정당화될 수 없다", "항상 정당화될 수 있다"], "Pt": ["Nunca se justifica", "Sempre se justifica"],
        "Ru": ["Никогда не оправдано", "Всегда оправдано"],
        "Vi": ["Không bao giờ chấp nhận được", "Luôn chấp nhận được"], "Zh": ["绝不可以接受", "总是可以接受"],
    },
    "freq4": {
        "En": ["Often", "Sometimes", "Rarely", "Never"], "De": ["Oft", "Manchmal", "Selten", "Nie"],
        "Es": ["A menudo", "A veces", "Rara vez", "Nunca"], "Ja": ["よくある", "時々ある", "めったにない", "まったくない"],
        "Ko": ["자주", "가끔", "드물게", "전혀"], "Pt": ["Frequentemente", "Às vezes", "Raramente", "Nunca"],
        "Ru": ["Часто", "Иногда", "Редко", "Никогда"],
        "Vi": ["Thường xuyên", "Thỉnh thoảng", "Hiếm khi", "Không bao giờ"], "Zh": ["经常", "有时", "很少", "从不"],
    },
    "good4": {
        "En": ["Very good", "Fairly good", "Fairly bad", "Very bad"],
        "De": ["Sehr gut", "Ziemlich gut", "Ziemlich schlecht", "Sehr schlecht"],
        "Es": ["Muy bueno", "Bastante bueno", "Bastante malo", "Muy malo"],
        "Ja": ["非常に良い", "やや良い", "やや悪い", "非常に悪い"],
        "Ko": ["매우 좋다", "대체로 좋다", "대체로 나쁘다", "매우 나쁘다"],
        "Pt": ["Muito bom", "Razoavelmente bom", "Razoavelmente mau", "Muito mau"],
        "Ru": ["Очень хорошо", "Довольно хорошо", "Довольно плохо", "Очень плохо"],
        "Vi": ["Rất tốt", "Khá tốt", "Khá tệ", "Rất tệ"], "Zh": ["非常好", "比较好", "比较差", "非常差"],
    },
    "worry4": {
        "En": ["Very much", "A good deal", "Not much", "Not at all"],
        "De": ["Sehr stark", "Ziemlich stark", "Nicht sehr", "Überhaupt nicht"],
        "Es": ["Mucho", "Bastante", "No mucho", "Nada"],
        "Ja": ["非常に心配", "かなり心配", "あまり心配でない", "まったく心配でない"],
        "Ko": ["매우 걱정한다", "상당히 걱정한다", "별로 걱정하지 않는다", "전혀 걱정하지 않는다"],
        "Pt": ["Muito", "Bastante", "Pouco", "Nada"],
        "Ru": ["Очень сильно", "Довольно сильно", "Не очень", "Совсем нет"],
        "Vi": ["Rất nhiều", "Khá nhiều", "Không nhiều", "Hoàn toàn không"],
        "Zh": ["非常担心", "比较担心", "不太担心", "完全不担心"],
    },
    "happy4": {
        "En": ["Very happy", "Rather happy", "Not very happy", "Not at all happy"],
        "De": ["Sehr glücklich", "Ziemlich glücklich", "Nicht sehr glücklich", "Überhaupt nicht glücklich"],
        "Es": ["Muy feliz", "Bastante feliz", "No muy feliz", "Nada feliz"],
        "Ja": ["非常に幸せ", "やや幸せ", "あまり幸せでない", "まったく幸せでない"],
        "Ko": ["매우 행복하다", "대체로 행복하다", "별로 행복하지 않다", "전혀 행복하지 않다"],
        "Pt": ["Muito feliz", "Bastante feliz", "Pouco feliz", "Nada feliz"],
        "Ru": ["Очень счастлив", "Скорее счастлив", "Не очень счастлив", "Совсем не счастлив"],
        "Vi": ["Rất hạnh phúc", "Khá hạnh phúc", "Không hạnh phúc lắm", "Hoàn toàn không hạnh phúc"],
        "Zh": ["非常幸福", "比较幸福", "不太幸福", "一点也不幸福"],
    },
    "close4": {
        "En": ["Very close", "Close", "Not very close", "Not close at all"],
        "De": ["Sehr verbunden", "Verbunden", "Nicht sehr verbunden", "Überhaupt nicht verbunden"],
        "Es": ["Muy cercano", "Cercano", "No muy cercano", "Nada cercano"],
        "Ja": ["非常に親近感がある", "親近感がある", "あまり親近感がない", "まったく親近感がない"],
        "Ko": ["매우 가깝게 느낀다", "가깝게 느낀다", "별로 가깝게 느끼지 않는다", "전혀 가깝게 느끼지 않는다"],
        "Pt": ["Muito próximo", "Próximo", "Pouco próximo", "Nada próximo"],
        "Ru": ["Очень близко", "Близко", "Не очень близко", "Совсем не близко"],
        "Vi": ["Rất gắn bó", "Gắn bó", "Không gắn bó lắm", "Hoàn toàn không gắn bó"],
        "Zh": ["非常亲近", "亲近", "不太亲近", "完全不亲近"],
    },
    "member3": {
        "En": ["Active member", "Inactive member", "Don't belong"],
        "De": ["Aktives Mitglied", "Passives Mitglied", "Kein Mitglied"],
        "Es": ["Miembro activo", "Miembro inactivo", "No pertenece"],
        "Ja": ["積極的に活動している", "所属しているが活動していない", "所属していない"],
        "Ko": ["적극 활동 회원", "비활동 회원", "회원 아님"],
        "Pt": ["Membro ativo", "Membro inativo", "Não pertence"],
        "Ru": ["Активный член", "Неактивный член", "Не состою"],
        "Vi": ["Thành viên tích cực", "Thành viên không tích cực", "Không tham gia"],
        "Zh": ["积极成员", "非积极成员", "不属于"],
    },
    "action3": {
        "En": ["Have done", "Might do", "Would never do"],
        "De": ["Habe ich getan", "Würde ich vielleicht tun", "Würde ich nie tun"],
        "Es": ["Lo ha hecho", "Podría hacerlo", "Nunca lo haría"],
        "Ja": ["したことがある", "するかもしれない", "決してしない"],
        "Ko": ["해 본 적 있다", "할 수도 있다", "절대 하지 않겠다"],
        "Pt": ["Já fez", "Poderia fazer", "Nunca faria"],
        "Ru": ["Делал", "Мог бы сделать", "Никогда не стал бы"],
        "Vi": ["Đã từng làm", "Có thể làm", "Sẽ không bao giờ làm"],
        "Zh": ["做过", "可能会做", "绝不会做"],
    },
    "change3": {
        "En": ["Good thing", "Don't mind", "Bad thing"], "De": ["Gut", "Egal", "Schlecht"],
        "Es": ["Algo bueno", "No le importa", "Algo malo"], "Ja": ["良いこと", "気にしない", "悪いこと"],
        "Ko": ["좋은 일", "상관없다", "나쁜 일"], "Pt": ["Uma coisa boa", "Tanto faz", "Uma coisa má"],
        "Ru": ["Хорошо", "Всё равно", "Плохо"], "Vi": ["Điều tốt", "Không bận tâm", "Điều xấu"],
        "Zh": ["好事", "无所谓", "坏事"],
    },
    "pair2": {
        "En": ["First statement", "Second statement"], "De": ["Erste Aussage", "Zweite Aussage"],
        "Es": ["Primera afirmación", "Segunda afirmación"], "Ja": ["最初の意見", "二番目の意見"],
        "Ko": ["첫 번째 의견", "두 번째 의견"], "Pt": ["Primeira afirmação", "Segunda afirmação"],
        "Ru": ["Первое утверждение", "Второе утверждение"], "Vi": ["Ý kiến thứ nhất", "Ý kiến thứ hai"],
        "Zh": ["第一种说法", "第二种说法"],
    },
    "vote3": {
        "En": ["Always", "Usually", "Never"], "De": ["Immer", "Meistens", "Nie"],
        "Es": ["Siempre", "Normalmente", "Nunca"], "Ja": ["いつも", "たいてい", "一度もない"],
        "Ko": ["항상", "대체로", "전혀"], "Pt": ["Sempre", "Geralmente", "Nunca"],
        "Ru": ["Всегда", "Обычно", "Никогда"], "Vi": ["Luôn luôn", "Thường thường", "Không bao giờ"],
        "Zh": ["总是", "通常", "从不"],
    },
    "freq5": {
        "En": ["Daily", "Weekly", "Monthly", "Less than monthly", "Never"],
        "De": ["Täglich", "Wöchentlich", "Monatlich", "Seltener", "Nie"],
        "Es": ["Diariamente", "Semanalmente", "Mensualmente", "Menos de una vez al mes", "Nunca"],
        "Ja": ["毎日", "毎週", "毎月", "月に1回未満", "まったくない"],
        "Ko": ["매일", "매주", "매월", "월 1회 미만", "전혀"],
        "Pt": ["Diariamente", "Semanalmente", "Mensalmente", "Menos de uma vez por mês", "Nunca"],
        "Ru": ["Ежедневно", "Еженедельно", "Ежемесячно", "Реже раза в месяц", "Никогда"],
        "Vi": ["Hằng ngày", "Hằng tuần", "Hằng tháng", "Ít hơn hằng tháng", "Không bao giờ"],
        "Zh": ["每天", "每周", "每月", "少于每月一次", "从不"],
    },
    "obj3": {
        "En": ["France", "China", "India"], "De": ["Frankreich", "China", "Indien"],
        "Es": ["Francia", "China", "India"], "Ja": ["フランス", "中国", "インド"],
        "Ko": ["프랑스", "중국", "인도"], "Pt": ["França", "China", "Índia"],
        "Ru": ["Франция", "Китай", "Индия"], "Vi": ["Pháp", "Trung Quốc", "Ấn Độ"],
        "Zh": ["法国", "中国", "印度"],
    },
    "better3": {
        "En": ["Better off", "About the same", "Worse off"], "De": ["Besser", "Etwa gleich", "Schlechter"],
        "Es": ["Mejor", "Más o menos igual", "Peor"], "Ja": ["より良い", "ほぼ同じ", "より悪い"],
        "Ko": ["더 낫다", "비슷하다", "더 못하다"], "Pt": ["Melhor", "Mais ou menos igual", "Pior"],
        "Ru": ["Лучше", "Примерно так же", "Хуже"], "Vi": ["Tốt hơn", "Như nhau", "Tệ hơn"],
        "Zh": ["更好", "差不多", "更差"],
    },
}
TEN_POINT = {"scale10", "just10"}

STEMS = {
    "imp4": {
        "En": "How important is the life domain described in item {id}?",
        "De": "Wie wichtig ist der in Punkt {id} beschriebene Lebensbereich?",
        "Es": "¿Qué tan importante es el ámbito de la vida descrito en el punto {id}?",
        "Ja": "項目{id}で示された生活領域はどのくらい重要ですか？",
        "Ko": "항목 {id}에 설명된 생활 영역은 얼마나 중요합니까?",
        "Pt": "Qual a importância da área da vida descrita no item {id}?",
        "Ru": "Насколько важна сфера жизни, описанная в пункте {id}?",
        "Vi": "Lĩnh vực cuộc sống được mô tả ở mục {id} quan trọng như thế nào?",
        "Zh": "第{id}项所描述的生活领域有多重要？",
    },
    "mention2": {
        "En": "Is the quality in item {id} important for children to learn at home?",
        "De": "Ist die Eigenschaft in Punkt {id} wichtig, damit Kinder sie zu Hause lernen?",
        "Es": "¿Es importante que los niños aprendan en casa la cualidad del punto {id}?",
        "Ja": "項目{id}の資質は子どもが家庭で学ぶべき大切なものですか？",
        "Ko": "항목 {id}의 자질은 아이들이 가정에서 배워야 할 중요한 것입니까?",
        "Pt": "A qualidade do item {id} é importante para as crianças aprenderem em casa?",
        "Ru": "Важно ли, чтобы дети учились дома качеству из пункта {id}?",
        "Vi": "Phẩm chất ở mục {id} có quan trọng để trẻ em học ở nhà không?",
        "Zh": "第{id}项中的品质是孩子在家中应学习的重要品质吗？",
    },
    "agree": {
        "En": "Do you agree or disagree with the statement in item {id}?",
        "De": "Stimmen Sie der Aussage in Punkt {id} zu oder nicht?",
        "Es": "¿Está de acuerdo o en desacuerdo con la afirmación del punto {id}?",
        "Ja": "項目{id}の意見に賛成ですか、反対ですか？",
        "Ko": "항목 {id}의 진술에 동의합니까, 동의하지 않습니까?",
        "Pt": "Concorda ou discorda da afirmação do item {id}?",
        "Ru": "Согласны ли вы с утверждением из пункта {id}?",
        "Vi": "Bạn đồng ý hay không đồng ý với nhận định ở mục {id}?",
        "Zh": "您是否同意第{id}项中的说法？",
    },
    "trust4": {
        "En": "How much do you trust the group of people in item {id}?",
        "De": "Wie sehr vertrauen Sie der Personengruppe in Punkt {id}?",
        "Es": "¿Cuánto confía en el grupo de personas del punto {id}?",
        "Ja": "項目{id}の人々をどのくらい信頼していますか？",
        "Ko": "항목 {id}의 사람들을 얼마나 신뢰합니까?",
        "Pt": "Quanto confia no grupo de pessoas do item {id}?",
        "Ru": "Насколько вы доверяете группе людей из пункта {id}?",
        "Vi": "Bạn tin tưởng nhóm người ở mục {id} đến mức nào?",
        "Zh": "您在多大程度上信任第{id}项中的人群？",
    },
    "conf4": {
        "En": "How much confidence do you have in the organization in item {id}?",
        "De": "Wie viel Vertrauen haben Sie in die Organisation in Punkt {id}?",
        "Es": "¿Cuánta confianza tiene en la organización del punto {id}?",
        "Ja": "項目{id}の組織をどのくらい信頼していますか？",
        "Ko": "항목 {id}의 기관을 얼마나 신뢰합니까?",
        "Pt": "Quanta confiança tem na organização do item {id}?",
        "Ru": "Насколько вы доверяете организации из пункта {id}?",
        "Vi": "Bạn tin tưởng tổ chức ở mục {id} đến mức nào?",
        "Zh": "您对第{id}项中的机构有多大信心？",
    },
    "yesno2": {
        "En": "Do you hold the belief described in item {id}?",
        "De": "Teilen Sie die in Punkt {id} beschriebene Überzeugung?",
        "Es": "¿Comparte la creencia descrita en el punto {id}?",
        "Ja": "項目{id}に書かれた信念を持っていますか？",
        "Ko": "항목 {id}에 설명된 믿음을 가지고 있습니까?",
        "Pt": "Partilha a crença descrita no item {id}?",
        "Ru": "Разделяете ли вы убеждение из пункта {id}?",
        "Vi": "Bạn có niềm tin được mô tả ở mục {id} không?",
        "Zh": "您是否持有第{id}项所描述的信念？",
    },
    "scale10": {
        "En": "Where would you place your view on the scale in item {id}?",
        "De": "Wo würden Sie Ihre Ansicht auf der Skala in Punkt {id} einordnen?",
        "Es": "¿Dónde ubicaría su opinión en la escala del punto {id}?",
        "Ja": "項目{id}の尺度で、あなたの考えはどこに位置しますか？",
        "Ko": "항목 {id}의 척도에서 당신의 견해는 어디에 해당합니까?",
        "Pt": "Onde situaria a sua opinião na escala do item {id}?",
        "Ru": "Где бы вы расположили свое мнение на шкале из пункта {id}?",
        "Vi": "Bạn sẽ đặt quan điểm của mình ở đâu trên thang đo của mục {id}?",
        "Zh": "在第{id}项的量表上，您的看法处于什么位置？",
    },
    "just10": {
        "En": "Can the action in item {id} always be justified, never be justified, or something in between?",
        "De": "Ist die Handlung in Punkt {id} immer gerechtfertigt, nie gerechtfertigt oder etwas dazwischen?",
        "Es": "¿La acción del punto {id} se justifica siempre, nunca o algo intermedio?",
        "Ja": "項目{id}の行為は常に正当化できますか、決してできませんか、それともその中間ですか？",
        "Ko": "항목 {id}의 행동은 항상 정당화될 수 있습니까, 결코 정당화될 수 없습니까, 아니면 그 중간입니까?",
        "Pt": "A ação do item {id} justifica-se sempre, nunca ou algo intermédio?",
        "Ru": "Можно ли оправдать поступок из пункта {id} всегда, никогда или в какой-то мере?",
        "Vi": "Hành động ở mục {id} luôn chấp nhận được, không bao giờ chấp nhận được hay ở mức giữa?",
        "Zh": "第{id}项中的行为是总是可以接受、绝不可以接受，还是介于两者之间？",
    },
    "freq4": {
        "En": "How often does the situation in item {id} happen to you?",
        "De": "Wie oft erleben Sie die Situation in Punkt {id}?",
        "Es": "¿Con qué frecuencia le ocurre la situación del punto {id}?",
        "Ja": "項目{id}の状況はどのくらいの頻度で起こりますか？",
        "Ko": "항목 {id}의 상황을 얼마나 자주 겪습니까?",
        "Pt": "Com que frequência lhe acontece a situação do item {id}?",
        "Ru": "Как часто с вами происходит ситуация из пункта {id}?",
        "Vi": "Tình huống ở mục {id} xảy ra với bạn thường xuyên như thế nào?",
        "Zh": "第{id}项中的情况多久发生在您身上一次？",
    },
    "good4": {
        "En": "How good or bad is the political system in item {id}?",
        "De": "Wie gut oder schlecht ist das politische System in Punkt {id}?",
        "Es": "¿Qué tan bueno o malo es el sistema político del punto {id}?",
        "Ja": "項目{id}の政治体制はどのくらい良い、または悪いと思いますか？",
        "Ko": "항목 {id}의 정치 체제는 얼마나 좋거나 나쁩니까?",
        "Pt": "Quão bom ou mau é o sistema político do item {id}?",
        "Ru": "Насколько хороша или плоха политическая система из пункта {id}?",
        "Vi": "Hệ thống chính trị ở mục {id} tốt hay tệ đến mức nào?",
        "Zh": "第{id}项中的政治制度有多好或多差？",
    },
    "worry4": {
        "En": "How much do you worry about the situation in item {id}?",
        "De": "Wie sehr machen Sie sich Sorgen über die Situation in Punkt {id}?",
        "Es": "¿Cuánto le preocupa la situación del punto {id}?",
        "Ja": "項目{id}の状況をどのくらい心配していますか？",
        "Ko": "항목 {id}의 상황을 얼마나 걱정합니까?",
        "Pt": "Quanto se preocupa com a situação do item {id}?",
        "Ru": "Насколько вас беспокоит ситуация из пункта {id}?",
        "Vi": "Bạn lo lắng về tình huống ở mục {id} đến mức nào?",
        "Zh": "您对第{id}项中的情况有多担心？",
    },
    "happy4": {
        "En": "Taking all things together, how would you describe the feeling in item {id}?",
        "De": "Alles in allem, wie würden Sie das Gefühl in Punkt {id} beschreiben?",
        "Es": "En general, ¿cómo describiría el sentimiento del punto {id}?",
        "Ja": "全体として、項目{id}の気持ちをどう表しますか？",
        "Ko": "전반적으로 항목 {id}의 감정을 어떻게 표현하겠습니까?",
        "Pt": "De um modo geral, como descreveria o sentimento do item {id}?",
        "Ru": "В целом, как бы вы описали чувство из пункта {id}?",
        "Vi": "Nhìn chung, bạn mô tả cảm giác ở mục {id} như thế nào?",
        "Zh": "总的来说，您如何描述第{id}项中的感受？",
    },
    "close4": {
        "En": "How close do you feel to the community in item {id}?",
        "De": "Wie verbunden fühlen Sie sich mit der Gemeinschaft in Punkt {id}?",
        "Es": "¿Qué tan cercano se siente a la comunidad del punto {id}?",
        "Ja": "項目{id}の共同体にどのくらい親近感を持っていますか？",
        "Ko": "항목 {id}의 공동체에 얼마나 가깝게 느낍니까?",
        "Pt": "Quão próximo se sente da comunidade do item {id}?",
        "Ru": "Насколько близко вы себя чувствуете к сообществу из пункта {id}?",
        "Vi": "Bạn cảm thấy gắn bó với cộng đồng ở mục {id} đến mức nào?",
        "Zh": "您觉得自己与第{id}项中的群体有多亲近？",
    },
    "member3": {
        "En": "Are you a member of the organization in item {id}?",
        "De": "Sind Sie Mitglied der Organisation in Punkt {id}?",
        "Es": "¿Es usted miembro de la organización del punto {id}?",
        "Ja": "項目{id}の団体に所属していますか？",
        "Ko": "항목 {id}의 단체에 소속되어 있습니까?",
        "Pt": "É membro da organização do item {id}?",
        "Ru": "Состоите ли вы в организации из пункта {id}?",
        "Vi": "Bạn có phải là thành viên của tổ chức ở mục {id} không?",
        "Zh": "您是第{id}项中组织的成员吗？",
    },
    "action3": {
        "En": "Have you done, might you do, or would you never do the action in item {id}?",
        "De": "Haben Sie die Handlung in Punkt {id} getan, würden Sie sie vielleicht tun oder nie tun?",
        "Es": "¿Ha realizado, podría realizar o nunca realizaría la acción del punto {id}?",
        "Ja": "項目{id}の行動をしたことがありますか、するかもしれませんか、決してしませんか？",
        "Ko": "항목 {id}의 행동을 해 본 적이 있습니까, 할 수도 있습니까, 절대 하지 않겠습니까?",
        "Pt": "Já fez, poderia fazer ou nunca faria a ação do item {id}?",
        "Ru": "Делали ли вы, могли бы сделать или никогда не сделали бы действие из пункта {id}?",
        "Vi": "Bạn đã từng, có thể sẽ, hay sẽ không bao giờ làm hành động ở mục {id}?",
        "Zh": "您是否做过、可能会做或绝不会做第{id}项中的行为？",
    },
    "change3": {
        "En": "Would the future change in item {id} be a good thing, a bad thing, or don't you mind?",
        "De": "Wäre die zukünftige Veränderung in Punkt {id} gut, schlecht oder egal?",
        "Es": "¿El cambio futuro del punto {id} sería algo bueno, algo malo o no le importa?",
        "Ja": "項目{id}の将来の変化は良いことですか、悪いことですか、それとも気にしませんか？",
        "Ko": "항목 {id}의 미래 변화는 좋은 일입니까, 나쁜 일입니까, 아니면 상관없습니까?",
        "Pt": "A mudança futura do item {id} seria uma coisa boa, má ou tanto faz?",
        "Ru": "Будет ли изменение из пункта {id} хорошим, плохим или вам всё равно?",
        "Vi": "Thay đổi trong tương lai ở mục {id} là điều tốt, điều xấu, hay bạn không bận tâm?",
        "Zh": "第{id}项中的未来变化是好事、坏事，还是无所谓？",
    },
    "pair2": {
        "En": "Which of the two statements in item {id} comes closer to your view?",
        "De": "Welche der beiden Aussagen in Punkt {id} kommt Ihrer Ansicht näher?",
        "Es": "¿Cuál de las dos afirmaciones del punto {id} se acerca más a su opinión?",
        "Ja": "項目{id}の二つの意見のうち、あなたの考えに近いのはどちらですか？",
        "Ko": "항목 {id}의 두 진술 중 어느 것이 당신의 견해에 더 가깝습니까?",
        "Pt": "Qual das duas afirmações do item {id} está mais próxima da sua opinião?",
        "Ru": "Какое из двух утверждений в пункте {id} ближе к вашему мнению?",
        "Vi": "Nhận định nào trong hai nhận định ở mục {id} gần với quan điểm của bạn hơn?",
        "Zh": "第{id}项中的两种说法，哪一种更接近您的看法？",
    },
    "vote3": {
        "En": "How often do you vote in the elections in item {id}?",
        "De": "Wie oft wählen Sie bei den Wahlen in Punkt {id}?",
        "Es": "¿Con qué frecuencia vota en las elecciones del punto {id}?",
        "Ja": "項目{id}の選挙でどのくらい投票しますか？",
        "Ko": "항목 {id}의 선거에서 얼마나 자주 투표합니까?",
        "Pt": "Com que frequência vota nas eleições do item {id}?",
        "Ru": "Как часто вы голосуете на выборах из пункта {id}?",
        "Vi": "Bạn đi bầu trong các cuộc bầu cử ở mục {id} thường xuyên như thế nào?",
        "Zh": "您多久参加一次第{id}项中的选举投票？",
    },
    "freq5": {
        "En": "How often do you use the information source in item {id}?",
        "De": "Wie oft nutzen Sie die Informationsquelle in Punkt {id}?",
        "Es": "¿Con qué frecuencia utiliza la fuente de información del punto {id}?",
        "Ja": "項目{id}の情報源をどのくらいの頻度で利用しますか？",
        "Ko": "항목 {id}의 정보원을 얼마나 자주 이용합니까?",
        "Pt": "Com que frequência utiliza a fonte de informação do item {id}?",
        "Ru": "Как часто вы пользуетесь источником информации из пункта {id}?",
        "Vi": "Bạn sử dụng nguồn thông tin ở mục {id} thường xuyên như thế nào?",
        "Zh": "您多久使用一次第{id}项中的信息来源？",
    },
    "obj3": {
        "En": "Which of the options answers the knowledge question in item {id}?",
        "De": "Welche Option beantwortet die Wissensfrage in Punkt {id}?",
        "Es": "¿Qué opción responde la pregunta de conocimiento del punto {id}?",
        "Ja": "項目{id}の知識問題に答える選択肢はどれですか？",
        "Ko": "항목 {id}의 지식 문제에 맞는 선택지는 무엇입니까?",
        "Pt": "Qual opção responde à pergunta de conhecimento do item {id}?",
        "Ru": "Какой вариант отвечает на вопрос на знание из пункта {id}?",
        "Vi": "Lựa chọn nào trả lời câu hỏi kiến thức ở mục {id}?",
        "Zh": "哪个选项回答了第{id}项中的知识问题？",
    },
    "better3": {
        "En": "Compared with your parents at your age, how is the situation in item {id}?",
        "De": "Verglichen mit Ihren Eltern in Ihrem Alter, wie ist die Situation in Punkt {id}?",
        "Es": "Comparado con sus padres a su edad, ¿cómo es la situación del punto {id}?",
        "Ja": "あなたの年齢の頃の両親と比べて、項目{id}の状況はどうですか？",
        "Ko": "당신 나이 때의 부모님과 비교하여 항목 {id}의 상황은 어떻습니까?",
        "Pt": "Comparado com os seus pais na sua idade, como é a situação do item {id}?",
        "Ru": "По сравнению с вашими родителями в вашем возрасте, какова ситуация из пункта {id}?",
        "Vi": "So với cha mẹ bạn ở độ tuổi của bạn, tình hình ở mục {id} như thế nào?",
        "Zh": "与您父母在您这个年龄时相比，第{id}项中的情况如何？",
    },
}
STEM_OF = {"agree4": "agree", "agree5": "agree", "agree3": "agree"}

# Items whose wording is known; (text per language, optional label override).
SPECIFIC = {
    "Q1": {
        "En": "How important is family in your life?",
        "De": "Wie wichtig ist Ihnen die Familie in Ihrem Leben?",
        "Es": "¿Qué tan importante es la familia en su vida?",
        "Ja": "あなたの生活において家族はどのくらい重要ですか？",
        "Ko": "당신의 삶에서 가족은 얼마나 중요합니까?",
        "Pt": "Qual a importância da família na sua vida?",
        "Ru": "Насколько важна для вас семья?",
        "Vi": "Gia đình quan trọng như thế nào trong cuộc sống của bạn?",
        "Zh": "家庭在您的生活中有多重要？",
    },
    "Q29": {
        "En": "Do you agree that, on the whole, men make better political leaders than women do?",
        "De": "Stimmen Sie zu, dass Männer im Großen und Ganzen bessere politische Führer sind als Frauen?",
        "Es": "¿Está de acuerdo en que, en general, los hombres son mejores líderes políticos que las mujeres?",
        "Ja": "全体として、男性の方が女性よりも政治指導者として適していると思いますか？",
        "Ko": "전반적으로 남성이 여성보다 더 나은 정치 지도자가 된다는 데 동의합니까?",
        "Pt": "Concorda que, de um modo geral, os homens são melhores líderes políticos do que as mulheres?",
        "Ru": "Согласны ли вы, что в целом мужчины являются лучшими политическими лидерами, чем женщины?",
        "Vi": "Bạn có đồng ý rằng nhìn chung nam giới là những nhà lãnh đạo chính trị giỏi hơn nữ giới không?",
        "Zh": "您是否同意，总的来说，男性比女性更适合当政治领导人？",
    },
    "Q30": {
        "En": "Do you agree that a university education is more important for a boy than for a girl?",
        "De": "Stimmen Sie zu, dass ein Universitätsstudium für einen Jungen wichtiger ist als für ein Mädchen?",
        "Es": "¿Está de acuerdo en que la educación universitaria es más importante para un chico que para una chica?",
        "Ja": "大学教育は女の子より男の子にとって重要だと思いますか？",
        "Ko": "대학 교육이 여자아이보다 남자아이에게 더 중요하다는 데 동의합니까?",
        "Pt": "Concorda que a educação universitária é mais importante para um rapaz do que para uma rapariga?",
        "Ru": "Согласны ли вы, что высшее образование важнее для юноши, чем для девушки?",
        "Vi": "Bạn có đồng ý rằng giáo dục đại học quan trọng đối với con trai hơn con gái không?",
        "Zh": "您是否同意，大学教育对男孩比对女孩更重要？",
    },
    "Q31": {
        "En": "Do you agree that, on the whole, men make better business executives than women do?",
        "De": "Stimmen Sie zu, dass Männer im Großen und Ganzen bessere Führungskräfte in der Wirtschaft sind als Frauen?",
        "Es": "¿Está de acuerdo en que, en general, los hombres son mejores ejecutivos de empresa que las mujeres?",
        "Ja": "全体として、男性の方が女性よりも企業経営者として適していると思いますか？",
        "Ko": "전반적으로 남성이 여성보다 더 나은 기업 경영자가 된다는 데 동의합니까?",
        "Pt": "Concorda que, de um modo geral, os homens são melhores executivos de empresas do que as mulheres?",
        "Ru": "Согласны ли вы, что в целом мужчины являются лучшими руководителями бизнеса, чем женщины?",
        "Vi": "Bạn có đồng ý rằng nhìn chung nam giới là những nhà quản lý doanh nghiệp giỏi hơn nữ giới không?",
        "Zh": "您是否同意，总的来说，男性比女性更适合当企业高管？",
    },
    "Q33": {
        "En": "Do you agree that when jobs are scarce, men should have more right to a job than women?",
        "De": "Stimmen Sie zu, dass Männer mehr Recht auf einen Arbeitsplatz haben sollten als Frauen, wenn Arbeitsplätze knapp sind?",
        "Es": "¿Está de acuerdo en que cuando hay escasez de empleo, los hombres deberían tener más derecho a un trabajo que las mujeres?",
        "Ja": "仕事が少ないときは、女性より男性に優先的に仕事が与えられるべきだと思いますか？",
        "Ko": "일자리가 부족할 때 남성이 여성보다 일자리에 대해 더 많은 권리를 가져야 한다는 데 동의합니까?",
        "Pt": "Concorda que, quando há falta de emprego, os homens devem ter mais direito a um emprego do que as mulheres?",
        "Ru": "Согласны ли вы, что когда рабочих мест не хватает, у мужчин должно быть больше прав на работу, чем у женщин?",
        "Vi": "Bạn có đồng ý rằng khi khan hiếm việc làm, nam giới nên được ưu tiên có việc làm hơn nữ giới không?",
        "Zh": "您是否同意，在工作机会稀缺时，男性应比女性更有权获得工作？",
    },
    "Q57": {
        "En": "Generally speaking, would you say that most people can be trusted or that you need to be very careful in dealing with people?",
        "De": "Würden Sie ganz allgemein sagen, dass man den meisten Menschen vertrauen kann, oder dass man im Umgang mit Menschen sehr vorsichtig sein muss?",
        "Es": "En términos generales, ¿diría que se puede confiar en la mayoría de las personas o que hay que tener mucho cuidado al tratar con la gente?",
        "Ja": "一般的に言って、ほとんどの人は信頼できると思いますか、それとも人と接するときは用心するに越したことはないと思いますか？",
        "Ko": "일반적으로 말해서, 대부분의 사람을 신뢰할 수 있다고 생각합니까, 아니면 사람을 대할 때 매우 조심해야 한다고 생각합니까?",
        "Pt": "De um modo geral, diria que se pode confiar na maioria das pessoas ou que é preciso ter muito cuidado ao lidar com as pessoas?",
        "Ru": "Вообще говоря, считаете ли вы, что большинству людей можно доверять, или нужно быть очень осторожным в отношениях с людьми?",
        "Vi": "Nói chung, bạn cho rằng có thể tin tưởng hầu hết mọi người hay cần phải hết sức thận trọng khi giao tiếp với người khác?",
        "Zh": "一般来说，您认为大多数人是可以信任的，还是与人打交道要非常小心？",
    },
    "Q60": {
        "En": "How much do you trust people you know personally?",
        "De": "Wie sehr vertrauen Sie Menschen, die Sie persönlich kennen?",
        "Es": "¿Cuánto confía en las personas que conoce personalmente?",
        "Ja": "個人的に知っている人をどのくらい信頼していますか？",
        "Ko": "개인적으로 아는 사람들을 얼마나 신뢰합니까?",
        "Pt": "Quanto confia nas pessoas que conhece pessoalmente?",
        "Ru": "Насколько вы доверяете людям, которых знаете лично?",
        "Vi": "Bạn tin tưởng những người bạn quen biết cá nhân đến mức nào?",
        "Zh": "您在多大程度上信任您个人认识的人？",
    },
    "Q91": {
        "En": "Five countries have permanent seats on the Security Council of the United Nations. Which one of the following is not a member?",
        "De": "Fünf Länder haben ständige Sitze im Sicherheitsrat der Vereinten Nationen. Welches der folgenden Länder ist kein Mitglied?",
        "Es": "Cinco países tienen asientos permanentes en el Consejo de Seguridad de las Naciones Unidas. ¿Cuál de los siguientes no es miembro?",
        "Ja": "国連安全保障理事会には5つの常任理事国があります。次のうち常任理事国でないのはどれですか？",
        "Ko": "다섯 나라가 유엔 안전보장이사회의 상임이사국입니다. 다음 중 상임이사국이 아닌 나라는 어디입니까?",
        "Pt": "Cinco países têm assentos permanentes no Conselho de Segurança das Nações Unidas. Qual dos seguintes não é membro?",
        "Ru": "Пять стран имеют постоянные места в Совете Безопасности ООН. Какая из следующих стран не является его членом?",
        "Vi": "Năm quốc gia có ghế thường trực tại Hội đồng Bảo an Liên Hợp Quốc. Quốc gia nào sau đây không phải là thành viên?",
        "Zh": "五个国家是联合国安理会常任理事国。以下哪一个不是常任理事国？",
    },
    "Q120": {
        "En": "How high is the risk in this country to be held accountable for giving or receiving a bribe, gift or favor in return for public service?",
        "De": "Wie hoch ist in diesem Land das Risiko, für das Geben oder Annehmen von Bestechungsgeld, Geschenken oder Gefälligkeiten als Gegenleistung für öffentliche Dienste zur Rechenschaft gezogen zu werden?",
        "Es": "¿Qué tan alto es el riesgo en este país de ser responsabilizado por dar o recibir un soborno, regalo o favor a cambio de un servicio público?",
        "Ja": "この国で、公共サービスの見返りに賄賂や贈り物、便宜を授受して責任を問われるリスクはどのくらい高いですか？",
        "Ko": "이 나라에서 공공 서비스의 대가로 뇌물, 선물 또는 호의를 주고받아 책임을 질 위험은 얼마나 높습니까?",
        "Pt": "Qual o risco, neste país, de ser responsabilizado por dar ou receber um suborno, presente ou favor em troca de um serviço público?",
        "Ru": "Насколько высок в этой стране риск понести ответственность за дачу или получение взятки, подарка или услуги в обмен на государственную услугу?",
        "Vi": "Ở đất nước này, nguy cơ bị truy cứu trách nhiệm khi đưa hoặc nhận hối lộ, quà tặng hay ân huệ để đổi lấy dịch vụ công cao đến mức nào?",
        "Zh": "在这个国家，因提供或收受贿赂、礼物或好处以换取公共服务而被追究责任的风险有多高？",
    },
    "Q165": {"En": "Do you believe in God?", "De": "Glauben Sie an Gott?", "Es": "¿Cree usted en Dios?",
             "Ja": "神を信じますか？", "Ko": "신을 믿습니까?", "Pt": "Acredita em Deus?",
             "Ru": "Верите ли вы в Бога?", "Vi": "Bạn có tin vào Thượng đế không?", "Zh": "您相信上帝吗？"},
    "Q166": {"En": "Do you believe in life after death?", "De": "Glauben Sie an ein Leben nach dem Tod?",
             "Es": "¿Cree usted en la vida después de la muerte?", "Ja": "死後の世界を信じますか？",
             "Ko": "사후 세계를 믿습니까?", "Pt": "Acredita na vida depois da morte?",
             "Ru": "Верите ли вы в жизнь после смерти?", "Vi": "Bạn có tin vào cuộc sống sau khi chết không?",
             "Zh": "您相信死后有来世吗？"},
    "Q167": {"En": "Do you believe in hell?", "De": "Glauben Sie an die Hölle?", "Es": "¿Cree usted en el infierno?",
             "Ja": "地獄を信じますか？", "Ko": "지옥을 믿습니까?", "Pt": "Acredita no inferno?",
             "Ru": "Верите ли вы в ад?", "Vi": "Bạn có tin vào địa ngục không?", "Zh": "您相信地狱吗？"},
    "Q168": {"En": "Do you believe in heaven?", "De": "Glauben Sie an den Himmel?", "Es": "¿Cree usted en el cielo?",
             "Ja": "天国を信じますか？", "Ko": "천국을 믿습니까?", "Pt": "Acredita no céu?",
             "Ru": "Верите ли вы в рай?", "Vi": "Bạn có tin vào thiên đường không?", "Zh": "您相信天堂吗？"},
    "Q243": {
        "En": "How essential do you think it is as a characteristic of democracy that people choose their leaders in free elections?",
        "De": "Wie wesentlich ist es Ihrer Meinung nach als Merkmal der Demokratie, dass die Menschen ihre Führung in freien Wahlen wählen?",
        "Es": "¿Qué tan esencial cree que es, como característica de la democracia, que la gente elija a sus líderes en elecciones libres?",
        "Ja": "人々が自由な選挙で指導者を選ぶことは、民主主義の特徴としてどのくらい不可欠だと思いますか？",
        "Ko": "국민이 자유 선거로 지도자를 선출하는 것이 민주주의의 특징으로서 얼마나 필수적이라고 생각합니까?",
        "Pt": "Até que ponto considera essencial, como característica da democracia, que as pessoas escolham os seus líderes em eleições livres?",
        "Ru": "Насколько существенной характеристикой демократии, по вашему мнению, является то, что люди выбирают своих лидеров на свободных выборах?",
        "Vi": "Theo bạn, việc người dân chọn lãnh đạo qua bầu cử tự do là đặc điểm thiết yếu của dân chủ đến mức nào?",
        "Zh": "您认为人民通过自由选举选择领导人作为民主的特征有多重要？",
    },
    "Q250": {
        "En": "How important is it for you to live in a country that is governed democratically?",
        "De": "Wie wichtig ist es für Sie, in einem Land zu leben, das demokratisch regiert wird?",
        "Es": "¿Qué tan importante es para usted vivir en un país gobernado democráticamente?",
        "Ja": "民主的に統治された国に住むことは、あなたにとってどのくらい重要ですか？",
        "Ko": "민주적으로 통치되는 나라에 사는 것이 당신에게 얼마나 중요합니까?",
        "Pt": "Qual a importância, para si, de viver num país governado democraticamente?",
        "Ru": "Насколько для вас важно жить в стране, которая управляется демократически?",
        "Vi": "Việc sống ở một đất nước được quản lý dân chủ quan trọng với bạn như thế nào?",
        "Zh": "生活在一个民主治理的国家对您有多重要？",
    },
}
SPECIFIC_LABELS = {
    "Q57": {
        "En": ["Most people can be trusted", "Need to be very careful"],
        "De": ["Den meisten Menschen kann man vertrauen", "Man kann nicht vorsichtig genug sein"],
        "Es": ["Se puede confiar en la mayoría de las personas", "Hay que tener mucho cuidado"],
        "Ja": ["ほとんどの人は信頼できる", "用心するに越したことはない"],
        "Ko": ["대부분의 사람을 신뢰할 수 있다", "매우 조심해야 한다"],
        "Pt": ["Pode-se confiar na maioria das pessoas", "É preciso ter muito cuidado"],
        "Ru": ["Большинству людей можно доверять", "Нужно быть очень осторожным"],
        "Vi": ["Có thể tin tưởng hầu hết mọi người", "Cần phải hết sức thận trọng"],
        "Zh": ["大多数人是可以信任的", "与人打交道要非常小心"],
    },
    # ten-point endpoints
    "Q120": {
        "En": ["No risk at all", "Very high risk"], "De": ["Überhaupt kein Risiko", "Sehr hohes Risiko"],
        "Es": ["Ningún riesgo", "Riesgo muy alto"], "Ja": ["まったくリスクがない", "非常にリスクが高い"],
        "Ko": ["전혀 위험이 없다", "위험이 매우 높다"], "Pt": ["Nenhum risco", "Risco muito elevado"],
        "Ru": ["Никакого риска", "Очень высокий риск"],
        "Vi": ["Hoàn toàn không có nguy cơ", "Nguy cơ rất cao"], "Zh": ["完全没有风险", "风险非常高"],
    },
    "Q243": {
        "En": ["Not an essential characteristic of democracy", "An essential characteristic of democracy"],
        "De": ["Kein wesentliches Merkmal der Demokratie", "Ein wesentliches Merkmal der Demokratie"],
        "Es": ["No es una característica esencial de la democracia", "Es una característica esencial de la democracia"],
        "Ja": ["民主主義に不可欠な特徴ではない", "民主主義に不可欠な特徴である"],
        "Ko": ["민주주의의 필수적 특징이 아니다", "민주주의의 필수적 특징이다"],
        "Pt": ["Não é uma característica essencial da democracia", "É uma característica essencial da democracia"],
        "Ru": ["Не является существенной характеристикой демократии", "Является существенной характеристикой демократии"],
        "Vi": ["Không phải đặc điểm thiết yếu của dân chủ", "Là đặc điểm thiết yếu của dân chủ"],
        "Zh": ["不是民主的基本特征", "是民主的基本特征"],
    },
    "Q250": {
        "En": ["Not at all important", "Absolutely important"], "De": ["Überhaupt nicht wichtig", "Absolut wichtig"],
        "Es": ["Nada importante", "Absolutamente importante"], "Ja": ["まったく重要でない", "絶対に重要である"],
        "Ko": ["전혀 중요하지 않다", "절대적으로 중요하다"], "Pt": ["Nada importante", "Absolutamente importante"],
        "Ru": ["Совсем не важно", "Абсолютно важно"], "Vi": ["Hoàn toàn không quan trọng", "Cực kỳ quan trọng"],
        "Zh": ["一点也不重要", "绝对重要"],
    },
}

# ---------------------------------------------------------------------------
# Wave 7 layout: (first, last, scale, exclusion reason or None)
# ---------------------------------------------------------------------------
W7_LAYOUT = [
    (1, 6, "imp4", None),
    (7, 17, "mention2", "NotMultipleChoice"),
    (18, 26, "mention2", "NotMultipleChoice"),
    (27, 32, "agree4", None),
    (33, 35, "agree5", None),
    (36, 41, "agree4", None),
    (42, 42, "pair2", None),
    (43, 45, "change3", None),
    (46, 46, "happy4", "RequiresLifeExperience"),
    (47, 47, "good4", "RequiresLifeExperience"),
    (48, 50, "scale10", "RequiresLifeExperience"),
    (51, 55, "freq4", "RequiresLifeExperience"),
    (56, 56, "better3", "RequiresLifeExperience"),
    (57, 57, "pair2", None),
    (58, 63, "trust4", None),
    (64, 64, "conf4", "SlotEditing"),
    (65, 89, "conf4", None),
    (90, 90, "scale10", None),
    (91, 93, "obj3", "Objective"),
    (94, 105, "member3", "RequiresLifeExperience"),
    (106, 111, "scale10", None),
    (112, 112, "scale10", "RequiresNationality"),
    (113, 117, "agree4", "RequiresNationality"),
    (118, 118, "freq4", "RequiresNationality"),
    (119, 120, "scale10", "RequiresNationality"),
    (121, 121, "good4", None),
    (122, 129, "agree3", None),
    (130, 130, "agree4", None),
    (131, 131, "good4", "RequiresLifeExperience"),
    (132, 138, "freq4", "RequiresLifeExperience"),
    (139, 143, "worry4", None),
    (144, 145, "yesno2", "RequiresLifeExperience"),
    (146, 148, "worry4", None),
    (149, 150, "pair2", None),
    (151, 151, "yesno2", "RequiresNationality"),
    (152, 155, "pair2", "NotMultipleChoice"),
    (156, 157, "pair2", None),
    (158, 164, "scale10", None),
    (165, 168, "yesno2", None),
    (169, 170, "agree4", None),
    (171, 172, "freq4", "RequiresLifeExperience"),
    (173, 175, "pair2", None),
    (176, 176, "scale10", None),
    (177, 195, "just10", None),
    (196, 198, "agree4", None),
    (199, 199, "imp4", None),
    (200, 200, "freq4", "RequiresLifeExperience"),
    (201, 208, "freq5", "RequiresLifeExperience"),
    (209, 220, "action3", "RequiresLifeExperience"),
    (221, 222, "vote3", "RequiresLifeExperience"),
    (223, 223, "pair2", "NotMultipleChoice"),
    (224, 233, "freq4", "RequiresNationality"),
    (234, 234, "scale10", "RequiresNationality"),
    (235, 238, "good4", None),
    (239, 250, "scale10", None),
    (251, 252, "scale10", "RequiresNationality"),
    (253, 253, "agree4", "RequiresNationality"),
    (254, 254, "imp4", "RequiresNationality"),
    (255, 257, "close4", "RequiresNationality"),
    (258, 259, "close4", None),
]


def labels_for(qid, scale, lang):
    if scale in TEN_POINT:
        ends = SPECIFIC_LABELS.get(qid, SCALES[scale])[lang]
        return [ends[0]] + [str(i) for i in range(2, 10)] + [ends[1]]
    if qid in SPECIFIC_LABELS:
        return SPECIFIC_LABELS[qid][lang]
    return SCALES[scale][lang]


def text_for(qid, scale, lang):
    if qid in SPECIFIC:
        return SPECIFIC[qid][lang]
    return STEMS[STEM_OF.get(scale, scale)][lang].format(id=qid)


def question_record(qid, scale, lang, label_id=None):
    labels = labels_for(label_id or qid, scale, lang)
    keys = [str(i + 1) for i in range(len(labels))]
    return {
        "id": qid,
        "question": text_for(label_id or qid, scale, lang),
        "choice_keys": keys,
        "choices": labels,
        "answer": " ".join(f"{k}. {v}" for k, v in zip(keys, labels)),
    }


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


COUNTRIES = [
    ("AND", "Andorra", "Catalan;English;French;Spanish"), ("ARG", "Argentina", "Spanish"),
    ("ARM", "Armenia", "Armenian"), ("AUS", "Australia", "English"), ("BGD", "Bangladesh", "Bangla"),
    ("BOL", "Bolivia", "Spanish"), ("BRA", "Brazil", "Portuguese"), ("CAN", "Canada", "English;French"),
    ("COL", "Colombia", "Spanish"), ("CYP", "Cyprus", "Greek;Turkish"), ("CZE", "Czechia", "Czech"),
    ("CHL", "Chile", "Spanish"), ("CHN", "China", "Chinese"), ("ECU", "Ecuador", "Spanish"),
    ("EGY", "Egypt", "Arabic"), ("ETH", "Ethiopia", "Afan Oromo;Amharic;Tigrinya"),
    ("DEU", "Germany", "German"), ("GRC", "Greece", "Greek"), ("GTM", "Guatemala", "Spanish"),
    ("HKG", "Hong Kong SAR", "Chinese;English"),
    ("IND", "India", "Bengali;English;Hindi;Marathi;Punjabi;Telugu"), ("IDN", "Indonesia", "Indonesian"),
    ("IRN", "Iran", "Farsi"), ("IRQ", "Iraq", "Arabic"), ("JPN", "Japan", "Japanese"),
    ("JOR", "Jordan", "Arabic"), ("KAZ", "Kazakhstan", "Kazakh;Russian"), ("KEN", "Kenya", "Swahili"),
    ("KGZ", "Kyrgyzstan", "Kyrgyz;Russian"), ("LBN", "Lebanon", "Arabic"), ("LBY", "Libya", "Arabic"),
    ("MAC", "Macau SAR", "Chinese"), ("MYS", "Malaysia", "Chinese;Malay"), ("MDV", "Maldives", "Dhivehi"),
    ("MEX", "Mexico", "Spanish"), ("MNG", "Mongolia", "Mongolian"), ("MAR", "Morocco", "Arabic"),
    ("MMR", "Myanmar", "Burmese"), ("NLD", "Netherlands", "Dutch"), ("NZL", "New Zealand", "English"),
    ("NIC", "Nicaragua", "Spanish"), ("NGA", "Nigeria", "Hausa;Igbo;Yoruba"), ("PAK", "Pakistan", "Urdu"),
    ("PER", "Peru", "Spanish"),
    ("PHL", "Philippines", "Bicol;Cebuano;Filipino;Hiligaynon;Iluko;Tausug;Waray"),
    ("PRI", "Puerto Rico", "Spanish"), ("ROU", "Romania", "Romanian"), ("RUS", "Russia", "Russian"),
    ("SRB", "Serbia", "Serbian"), ("SGP", "Singapore", "Chinese;English;Malay"),
    ("SVK", "Slovakia", "Slovak"), ("KOR", "South Korea", "Korean"), ("TWN", "Taiwan", "Chinese"),
    ("TJK", "Tajikistan", "Russian;Tajik"), ("THA", "Thailand", "Thai"), ("TUN", "Tunisia", "Arabic"),
    ("TUR", "Turkey", "Turkish"), ("UKR", "Ukraine", "Russian;Ukrainian"),
    ("GBR", "United Kingdom Great Britain", "English"), ("NIR", "United Kingdom Northern Ireland", "English"),
    ("URY", "Uruguay", "Spanish"), ("USA", "United States", "English"), ("UZB", "Uzbekistan", "Uzbek"),
    ("VEN", "Venezuela", "Spanish"), ("VNM", "Vietnam", "Vietnamese"), ("ZWE", "Zimbabwe", "Ndebele;Shona"),
]

FIXTURE_COUNTRIES = ["ARG", "AUS", "BRA", "CHL", "CHN", "DEU", "EGY", "JPN", "KOR", "NLD", "RUS", "URY", "USA", "VNM"]
# Latent cultural position per country (2-d), plus cluster for Spanish speakers.
LATENT = {
    "USA": (0.9, 0.2), "AUS": (0.95, 0.35), "NLD": (1.0, 0.55), "DEU": (0.8, 0.6),
    "ARG": (0.15, -0.35), "CHL": (0.1, -0.4), "URY": (0.2, -0.3), "BRA": (0.0, -0.2),
    "CHN": (-0.6, 0.7), "JPN": (0.3, 0.9), "KOR": (-0.1, 0.8), "VNM": (-0.5, 0.4),
    "RUS": (-0.2, 0.3), "EGY": (-1.0, -0.6),
}
# Pairs dropped from wave 7 to exercise coverage reporting.
DROPPED_W7 = {("CHN", "Q199"), ("EGY", "Q176"), ("EGY", "Q177"), ("VNM", "Q235"), ("KOR", "Q121")}


def distribution(rng, n, center, width):
    weights = []
    for k in range(n):
        weights.append(math.exp(-((k - center) ** 2) / (2 * width * width)) + 0.02 * rng.random())
    s = sum(weights)
    return [w / s for w in weights]


def counts_rows(rng, country, wave, qid, n, center, width, respondents=1200):
    probs = distribution(rng, n, center, width)
    counts = [int(round(p * respondents)) for p in probs]
    if sum(counts) == 0:
        counts[0] = 1
    rows = [(country, wave, qid, str(k + 1), c) for k, c in enumerate(counts)]
    # non-substantive answer codes (don't know / no answer)
    if rng.random() < 0.5:
        rows.append((country, wave, qid, "-1", rng.randint(5, 40)))
    if rng.random() < 0.2:
        rows.append((country, wave, qid, "-2", rng.randint(1, 10)))
    return rows


def main():
    rng = random.Random(20240607)
    qdir = os.path.join(ROOT, "questions")
    rdir = os.path.join(ROOT, "rules")
    cdir = os.path.join(ROOT, "counts")
    for d in (qdir, rdir, cdir):
        os.makedirs(d, exist_ok=True)

    # wave 7 questionnaires
    w7 = []
    rules7 = []
    for first, last, scale, reason in W7_LAYOUT:
        for i in range(first, last + 1):
            qid = f"Q{i}"
            w7.append((qid, scale))
            if reason:
                rules7.append((qid, reason))
    assert len(w7) == 259, len(w7)
    retained = [(q, s) for q, s in w7 if q not in {r[0] for r in rules7}]
    assert len(retained) == 144, len(retained)
    for lang in LANGS:
        write_jsonl(os.path.join(qdir, f"WV7_{LANG_NAMES[lang]}.jsonl"),
                    [question_record(q, s, lang) for q, s in w7])
    write_csv(os.path.join(rdir, "exclusions_WV7.csv"), ["question_id", "reason"], rules7)

    # crossmap + waves 5 and 6
    scale_of = dict(w7)
    pool = [q for q, _ in retained]
    picked = sorted(rng.sample(pool, 92), key=lambda q: int(q[1:]))
    bad = rng.sample(range(92), 17)
    blank5, blank6, excl5, excl6 = bad[:6], bad[6:11], bad[11:14], bad[14:17]
    cross = []
    w5, w6 = [], []
    rules5, rules6 = [], []
    v5, v6 = 10, 10
    for idx, q in enumerate(picked):
        id5 = id6 = ""
        if idx not in blank5:
            id5 = f"V{v5}"
            v5 += rng.randint(1, 3)
            w5.append((id5, scale_of[q], q))
            if idx in excl5:
                rules5.append((id5, "RequiresLifeExperience"))
        if idx not in blank6:
            id6 = f"V{v6}"
            v6 += rng.randint(1, 3)
            w6.append((id6, scale_of[q], q))
            if idx in excl6:
                rules6.append((id6, "RequiresNationality"))
        cross.append((q, id5, id6, q))
    # wave-specific filler items that are not in the crossmap
    for k in range(12):
        w5.append((f"V{v5 + 1 + k}", "freq4", None))
        rules5.append((f"V{v5 + 1 + k}", "RequiresLifeExperience"))
        w6.append((f"V{v6 + 1 + k}", "agree4", None))
    w5.sort(key=lambda r: int(r[0][1:]))
    w6.sort(key=lambda r: int(r[0][1:]))

    def wave_records(items):
        out = []
        for vid, scale, src in items:
            rec = question_record(vid, scale, "En", label_id=src)
            out.append(rec)
        return out

    write_jsonl(os.path.join(qdir, "WV5_English.jsonl"), wave_records(w5))
    write_jsonl(os.path.join(qdir, "WV6_English.jsonl"), wave_records(w6))
    write_csv(os.path.join(rdir, "exclusions_WV5.csv"), ["question_id", "reason"], rules5)
    write_csv(os.path.join(rdir, "exclusions_WV6.csv"), ["question_id", "reason"], rules6)
    write_csv(os.path.join(rdir, "crossmap.csv"), ["canonical_id", "wave5_id", "wave6_id", "wave7_id"], cross)
    dropped5 = {r[0] for r in rules5}
    dropped6 = {r[0] for r in rules6}
    shared = [c for c in cross if c[1] and c[2] and c[1] not in dropped5 and c[2] not in dropped6]
    assert len(shared) == 75, len(shared)

    # question loadings
    loading = {}
    for q, s in w7:
        loading[q] = (rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 0.15))

    def center_for(country, q, n, wave):
        lx, ly = LATENT[country]
        a, b, c = loading[q]
        drift = 0.35 * (7 - wave)
        z = a * lx + b * ly + c + drift * (0.5 - rng.random() * 0.2)
        return (n - 1) / 2 + (n - 1) / 2 * math.tanh(z)

    rows = []
    for country in FIXTURE_COUNTRIES:
        for q, s in retained:
            if (country, q) in DROPPED_W7:
                continue
            n = len(labels_for(q, s, "En"))
            width = 0.6 + 0.25 * n / 4
            rows += counts_rows(rng, country, 7, q, n, center_for(country, q, n, 7), width)
    for wave, items in ((5, w5), (6, w6)):
        for country in FIXTURE_COUNTRIES:
            if wave == 5 and country == "EGY":
                continue
            for vid, s, src in items:
                if src is None:
                    continue
                n = len(labels_for(src, s, "En"))
                width = 0.6 + 0.25 * n / 4
                rows += counts_rows(rng, country, wave, vid, n, center_for(country, src, n, wave), width)
    write_csv(os.path.join(cdir, "fixture_counts.csv"), ["country", "wave", "question_id", "option_key", "count"], rows)

    write_csv(os.path.join(ROOT, "countries.csv"), ["code", "name", "survey_languages"], COUNTRIES)
    assert len(COUNTRIES) == 66

    print(f"wave7 retained {len(retained)}; crossmap rows {len(cross)}; count rows {len(rows)}")


if __name__ == "__main__":
    main()
