"""Regenerates the hermetic Spanish-culture corpus used by the end-to-end run."""
import json
from pathlib import Path

HERE = Path(__file__).resolve().parent

PAGES = {
    # celebration of festivals
    "https://en.wikipedia.org/wiki/Falles": ("Falles - Wikipedia", [
        "Las Fallas is a traditional festival held in Valencia, Spain, every March in honour of Saint Joseph.",
        "Fireworks and bonfires play a significant role in Las Fallas.",
        "Neighbourhood associations spend the whole year building large satirical figures called ninots.",
        "On the final night of the festival the figures are burned in the streets during the Cremà.",
        "Daily firecracker displays called mascletàs fill the main square of Valencia at two in the afternoon.",
    ]),
    "https://www.spain.info/en/calendar/tomatina/": ("La Tomatina in Buñol | Spain tourism", [
        "La Tomatina is a festival held in the town of Buñol on the last Wednesday of August.",
        "Thousands of participants throw ripe tomatoes at each other for about one hour.",
        "Fire trucks hose down the streets once the tomato fight of the celebration is over.",
        "Entry to the Spanish festival has required a paid ticket since 2013 to limit crowd size.",
    ]),
    "https://www.bbc.co.uk/travel/san-fermin-pamplona": ("The running of the bulls in Pamplona - BBC Travel", [
        "The San Fermín festival in Pamplona, Spain, begins every year on the sixth of July.",
        "Participants traditionally dress in white clothing with a red scarf tied around the neck.",
        "The morning bull runs along a narrow route that ends at the bullring of Pamplona.",
        "The celebration closes at midnight on the fourteenth of July with the song Pobre de mí.",
    ]),
    "https://www.sportsworld.example.com/liga-results": ("La Liga weekend results", [
        "Real Madrid defeated Valencia by three goals to one in the league match on Saturday evening.",
        "The Spanish striker scored twice before half time and was substituted after an injury.",
        "Barcelona remain second in the table after a goalless draw against Sevilla away from home.",
        "Ticket prices for the next derby in Spain have risen sharply according to supporters groups.",
    ]),
    # religious holidays
    "https://en.wikipedia.org/wiki/Holy_Week_in_Spain": ("Holy Week in Spain - Wikipedia", [
        "Holy Week in Spain is a religious holiday marked by processions in the week before Easter Sunday.",
        "Religious brotherhoods carry heavy floats with sculptures through the streets of Seville.",
        "Many penitents in the processions wear tall pointed hoods called capirotes.",
        "Good Friday is a public holiday in every region of Spain.",
    ]),
    "https://www.spain.info/en/calendar/christmas-three-kings/": ("Three Kings Day | Spain tourism", [
        "Spanish children traditionally receive gifts on Three Kings Day, the sixth of January.",
        "On the evening of the fifth of January towns hold parades for the religious holiday called Cabalgatas.",
        "Families in Spain share a ring shaped cake called roscón de Reyes on Three Kings Day.",
    ]),
    # eating habits
    "https://en.wikipedia.org/wiki/Spanish_cuisine": ("Spanish cuisine - Wikipedia", [
        "Lunch is traditionally the main meal of the day in Spain and is eaten between two and three in the afternoon.",
        "Dinner in Spain is usually served late, often after nine in the evening.",
        "Olive oil is the principal cooking fat in Spanish eating habits.",
        "Breakfast in Spain is typically light, often coffee with toast or a pastry.",
    ]),
    "https://www.spain.info/en/gastronomy/tapas/": ("Going for tapas | Spain tourism", [
        "Eating tapas, small portions of food shared among friends, is a popular habit in Spanish bars.",
        "Going from bar to bar for tapas is known in Spain as ir de tapeo.",
        "In Granada a free tapa is commonly served with each drink ordered at the bar.",
    ]),
    "https://www.theguardian.com/food/spanish-mealtimes": ("Why Spaniards eat so late - The Guardian", [
        "Dinner in Spain is usually served late, often after nine in the evening.",
        "Spanish eating habits include a mid morning snack known as the almuerzo.",
        "Many Spanish offices historically closed for a long lunch break in the early afternoon.",
        "Spanish families often gather for long lunches on Sundays that can last several hours.",
    ]),
    "https://www.educacion.gob.es/dieta-mediterranea": ("La dieta mediterránea en las escuelas - Ministerio de Educación", [
        "School canteens in Spain follow guidelines based on the Mediterranean diet.",
        "The Mediterranean diet in Spain emphasises vegetables, legumes, fish and olive oil.",
        "Fresh bread is served with almost every meal in Spanish eating habits.",
    ]),
    "https://forum.expatsinspain.example.org/t/meal-times": ("Expat forum: adjusting to Spanish meal times", [
        "Newcomers to Spain often find that restaurants do not open for dinner before eight thirty.",
        "A late afternoon snack called the merienda helps Spanish children bridge the gap before dinner.",
        "Sharing dishes in the middle of the table is a common part of Spanish eating habits.",
    ]),
    # alcohol
    "https://www.sanidad.gob.es/alcohol-menores": ("Alcohol y menores - Ministerio de Sanidad", [
        "The legal drinking age in Spain is 18.",
        "Selling alcohol to minors in Spain is prohibited and shops can be fined for doing so.",
        "Several Spanish cities restrict drinking alcohol in public streets and squares.",
    ]),
    "https://en.wikipedia.org/wiki/Wine_in_Spain": ("Spanish wine - Wikipedia", [
        "Wine is commonly served with lunch and dinner in Spain, usually in moderate amounts.",
        "Rioja and Ribera del Duero are two of the best known wine regions of Spain.",
        "Public drunkenness is generally frowned upon in Spain even though alcohol is widely consumed.",
    ]),
    "https://www.tripadvisor.com/spain-bar-culture": ("Bar etiquette in Spain - Tripadvisor", [
        "In Spain it is common to order a small beer called a caña when meeting friends at a bar.",
        "Toasting in Spain is done by saying salud while making eye contact with companions who drink alcohol.",
        "Spanish friends often take turns paying for rounds of drinks rather than splitting each bill.",
    ]),
    # greetings
    "https://www.commisceo-global.example.com/spain-guide": ("Spain - Language, Culture, Customs and Etiquette", [
        "In Spain friends and family usually greet each other with two kisses, one on each cheek.",
        "A firm handshake is the standard greeting in Spanish business settings.",
        "Spanish greeting principles favour warmth, and people often use first names once introduced.",
        "In Spain it is polite to greet shop staff with buenos días when entering a small shop.",
    ]),
    "https://www.busuu.example.com/spanish-greetings": ("How to greet people in Spain", [
        "Buenas tardes is the usual Spanish greeting from early afternoon until evening.",
        "Older people in Spain may be addressed with usted as a sign of respect when greeting them.",
        "Spanish people usually say hola and adiós even to strangers in lifts and waiting rooms.",
    ]),
    # punctuality
    "https://www.expatica.com/es/living/spanish-punctuality": ("Punctuality in Spain explained - Expatica", [
        "Arriving about fifteen minutes late to a dinner at a Spanish home is generally acceptable.",
        "Punctuality is expected for business meetings in Spain even though social events are relaxed.",
        "Guests in Spain rarely arrive early when visiting because hosts may still be preparing.",
    ]),
    # culture mismatch and boilerplate
    "https://www.japan-guide.example.com/festivals": ("Festivals in Japan", [
        "The Gion Matsuri festival in Kyoto takes place throughout the month of July.",
        "Cherry blossom viewing parties called hanami are a popular spring celebration in Japan.",
        "Many Japanese festivals feature portable shrines carried through the streets by local residents.",
    ]),
    "https://www.cookie-wall.example.com/fiestas": ("Accept cookies", [
        "Accept all cookies to continue.",
    ]),
    # seeds
    "https://www.spainthenandnow.example.com/origins-of-fiestas": ("Where Spanish festivals come from", [
        "Many Spanish festivals began as religious feasts honouring the local patron saint.",
        "The origin of the Fallas festival is linked to carpenters burning old wood at the end of winter.",
        "Some village festivals in Spain trace their origin to medieval harvest fairs.",
    ]),
}

QUERIES = {
    "celebration of festivals in Spanish culture": [
        "https://en.wikipedia.org/wiki/Falles",
        "https://www.spain.info/en/calendar/tomatina/",
        "https://www.sportsworld.example.com/liga-results",
        "https://www.bbc.co.uk/travel/san-fermin-pamplona",
        "https://www.japan-guide.example.com/festivals",
    ],
    "religious holidays in Spanish culture": [
        "https://en.wikipedia.org/wiki/Holy_Week_in_Spain",
        "https://www.spain.info/en/calendar/christmas-three-kings/",
        "https://www.cookie-wall.example.com/fiestas",
    ],
    "eating habits in Spanish culture": [
        "https://en.wikipedia.org/wiki/Spanish_cuisine",
        "https://www.spain.info/en/gastronomy/tapas/",
        "https://www.theguardian.com/food/spanish-mealtimes",
        "https://www.educacion.gob.es/dieta-mediterranea",
        "https://forum.expatsinspain.example.org/t/meal-times",
        "https://www.example.com/missing-page",
    ],
    "alcohol in Spanish culture": [
        "https://www.sanidad.gob.es/alcohol-menores",
        "https://en.wikipedia.org/wiki/Wine_in_Spain",
        "https://www.tripadvisor.com/spain-bar-culture",
    ],
    "general greeting principles in Spanish culture": [
        "https://www.commisceo-global.example.com/spain-guide",
        "https://www.busuu.example.com/spanish-greetings",
    ],
    "punctuality when visiting in Spanish culture": [
        "https://www.expatica.com/es/living/spanish-punctuality",
    ],
}

SEEDS = [
    ("https://www.spainthenandnow.example.com/origins-of-fiestas", "dimension.origin_of_festivals"),
]


def html_page(title, sentences):
    paras = "\n".join(f"    <p>{s}</p>" for s in sentences)
    return (
        "<!DOCTYPE html>\n<html><head><title>" + title + "</title>"
        "<style>body{font-family:sans-serif}</style>"
        "<script>window.analytics=[];</script></head>\n<body>\n"
        "  <nav><a href=\"/\">Home</a> | <a href=\"/travel\">Travel</a> | <a href=\"/login\">Sign in</a></nav>\n"
        "  <header><div class=\"banner\">Subscribe to our newsletter</div></header>\n"
        "  <article>\n    <h1>" + title.split(" - ")[0].split(" | ")[0] + "</h1>\n" + paras + "\n  </article>\n"
        "  <aside>Related: top ten beaches</aside>\n"
        "  <footer>&copy; 2024 Example Media. All rights reserved.</footer>\n"
        "</body></html>\n"
    )


def main():
    pages = {url: html_page(title, sents) for url, (title, sents) in PAGES.items()}
    (HERE / "pages.json").write_text(json.dumps({"pages": pages}, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                                     encoding="utf-8")
    queries = {}
    for q, urls in QUERIES.items():
        queries[q] = [{"url": u, "title": PAGES[u][0] if u in PAGES else "Missing", "snippet": "", "rank": i + 1}
                      for i, u in enumerate(urls)]
    (HERE / "search_corpus.json").write_text(
        json.dumps({"queries": queries}, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")
    lines = ["# curated seed pages: <url> [dimension_id]"] + [f"{u} {d}" for u, d in SEEDS]
    (HERE / "seed_urls.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
