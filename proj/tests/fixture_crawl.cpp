#include "fixture_crawl.hpp"

#include <filesystem>
#include <fstream>

#include "depcc/gzip.hpp"

namespace fixtures {

namespace {

using depcc::WarcRecord;
using depcc::WarcRecordType;

std::string http_wrap(const std::string& content_type, const std::string& html) {
    return "HTTP/1.1 200 OK\r\nContent-Type: " + content_type +
           "\r\nServer: fixture\r\n\r\n" + html;
}

std::string nav_block() {
    return "<nav><a href=\"/\">Home</a> <a href=\"/news\">News</a> "
           "<a href=\"/about\">About</a> <a href=\"/contact\">Contact</a> "
           "<a href=\"/login\">Login</a></nav>\n";
}

std::string footer_block() {
    return "<footer><a href=\"/privacy\">Privacy policy</a> "
           "<a href=\"/terms\">Terms of use</a> <a href=\"/sitemap\">Sitemap</a>"
           "</footer>\n";
}

std::string page(const std::string& title, const std::string& body_html) {
    return "<!DOCTYPE html>\n<html>\n<head><title>" + title +
           "</title></head>\n<body>\n" + nav_block() + body_html + footer_block() +
           "</body>\n</html>\n";
}

// The community-garden article; the exact-duplicate record reuses it verbatim.
std::string garden_html() {
    return page(
        "Community garden opens",
        "<h1>New community garden opens beside the old mill</h1>\n"
        "<p>The community garden on the east side of the river opened to the public "
        "on Saturday after two years of planning and fundraising. Volunteers built "
        "forty raised beds from reclaimed timber, laid gravel paths wide enough for "
        "wheelchairs, and planted a hedge of native shrubs along the road. Families "
        "who signed up in the spring have already started growing beans, carrots, "
        "salad leaves, and a remarkable quantity of pumpkins.</p>\n"
        "<p>The committee plans to run free workshops every month, covering compost, "
        "seed saving, and pruning of the old apple trees that survived from the "
        "orchard that once stood here. A rainwater tank donated by a local firm "
        "waters the whole site, and a small shelter offers shade on warm afternoons. "
        "Membership remains open to anyone who lives in the town, and the waiting "
        "list for beds is shorter than the organisers expected.</p>\n");
}

std::string trail_html(const std::string& rock) {
    return page(
        "Ridge trail guide",
        "<h1>Walking the ridge trail in early autumn</h1>\n"
        "<p>The ridge trail climbs steadily from the station car park through beech "
        "woods before it reaches the open moor. Most walkers take about three hours "
        "to finish the full loop, though the steep " + rock + " steps below the "
        "summit slow many groups down considerably. Waymarks are painted every few "
        "hundred metres, and the route never strays far from the stream, so it is a "
        "safe first hill walk for children who are used to a full day outside.</p>\n"
        "<p>Water from the spring at the halfway shelter is safe to drink, and the "
        "shelter itself was rebuilt last year with a new roof and benches. Dogs must "
        "stay on leads between April and June while the birds nest on the moor. The "
        "final descent follows an old quarry track into the village, where the tea "
        "room beside the bridge stays open until five on weekends throughout the "
        "season.</p>\n");
}

std::string library_html() {
    return page(
        "Library reopens",
        "<h1>Town library reopens after renovation</h1>\n"
        "<p>The town library reopened on Monday after a renovation that lasted "
        "eight months and cost less than the council had budgeted. The reading room "
        "has new oak shelves, better lighting, and a quiet gallery overlooking the "
        "square where students can work in the evenings. A lift now serves all "
        "three floors, and the children's section moved to the sunny corner room "
        "that once held the map archive.</p>\n"
        "<p>The archive itself has not gone far: its cabinets stand in a climate "
        "controlled basement, and the rarest maps were scanned so that visitors can "
        "browse them on screens without touching the fragile paper. Borrowing "
        "numbers in the first week were the highest recorded in a decade, and the "
        "librarians have extended Saturday opening hours as an experiment for the "
        "rest of the year. Membership is free for everyone who lives or studies in "
        "the district.</p>\n");
}

std::string bakery_html() {
    return page(
        "Bakery wins award",
        "<h1>Harbour bakery wins national bread award</h1>\n"
        "<p>The small bakery by the harbour has won a national award for its "
        "sourdough loaf, beating entries from far larger firms in the capital. The "
        "judges praised the open crumb, the dark crust, and the faint note of honey "
        "that comes from the rye starter the owners have kept alive for eleven "
        "years. Queues on Saturday mornings already stretch past the chandlery, and "
        "the award is unlikely to make them shorter.</p>\n"
        "<p>The bakers mill part of their flour themselves from grain grown on two "
        "farms upriver, and they credit the slow fermentation as much as the local "
        "wheat for the flavour. They bake only what the shop can sell the same day; "
        "anything left at closing goes to the food bank van that stops outside each "
        "evening. A second oven arrives next month, which should finally let them "
        "supply the cafe across the street without cutting the morning batch.</p>\n");
}

// Windows-1252 bytes: \222 is a curly apostrophe, \226 an en dash.
std::string observatory_html() {
    return page(
        "Observatory evenings",
        "<h1>Observatory opens its doors for comet season</h1>\n"
        "<p>The hilltop observatory will stay open late through the coming month "
        "while the comet remains visible. The society\222s volunteers will point the "
        "old refractor at the comet every clear evening between nine and midnight, "
        "and the planetarium downstairs will run a short show for children at half "
        "past eight. Entrance is free, though donations keep the dome turning.</p>\n"
        "<p>Visitors should dress warmly \226 the dome is unheated and the hill "
        "catches the wind \226 and leave car headlights off on the final stretch of "
        "the access road. The society\222s chair says the comet is the brightest "
        "since the observatory was founded, and that the queue for the eyepiece "
        "moves faster than people fear. Binoculars work well too, and members will "
        "be on the terrace with star charts to help newcomers find their way around "
        "the sky.</p>\n");
}

std::string ferry_html() {
    return page(
        "Ferry timetable changes",
        "<h1>Winter ferry timetable starts next week</h1>\n"
        "<p>The island ferry switches to its winter timetable next week, with the "
        "first crossing moving half an hour later and the last boat leaving the "
        "harbour at six. The company says the change matches the shorter days and "
        "gives the crew daylight for the exposed turn at the breakwater. Commuters "
        "who catch the early boat have been promised a heated waiting room this "
        "year, which the harbour master has wanted since the old shelter blew down "
        "two winters ago.</p>\n"
        "<p>Freight runs continue unchanged on Tuesdays and Fridays, and the "
        "livestock sailing before the autumn market will go ahead as usual. Tickets "
        "bought online remain valid on any crossing the same day, and islanders "
        "keep their resident discount. The company will review the timetable in "
        "February, when the new pier lights are due to be working and the longer "
        "evenings return.</p>\n");
}

std::string stadtfest_html() {
    return page(
        "Stadtfest am Wochenende",
        "<h1>Stadtfest bringt drei Tage Musik in die Altstadt</h1>\n"
        "<p>Das Stadtfest beginnt am Freitagabend mit einem Konzert auf dem "
        "Marktplatz und dauert bis Sonntagnacht. Die Altstadt bleibt das ganze "
        "Wochenende für Autos gesperrt, und die Busse fahren eine Umleitung über "
        "die Brücke am alten Speicher. Mehr als achtzig Stände bieten Essen aus der "
        "Region, Handwerk und Spiele für Kinder an, und die Musikschule tritt am "
        "Samstagnachmittag mit allen ihren Gruppen auf.</p>\n"
        "<p>Der Höhepunkt ist wie jedes Jahr das Feuerwerk über dem Fluss am "
        "Sonntagabend, das diesmal von den Werften gemeinsam bezahlt wird. Die "
        "Veranstalter bitten die Besucher, mit dem Rad oder zu Fuß zu kommen, weil "
        "die Parkplätze am Bahnhof schon am Freitag voll sein werden. Wer einen "
        "Stand anmelden möchte, findet die Unterlagen im Rathaus oder auf der Seite "
        "der Stadt, und der Erlös der Tombola geht an die Jugendfeuerwehr.</p>\n");
}

// Latin-1 bytes: \374 is u-umlaut, declared only by the meta tag.
std::string radweg_html() {
    return "<!DOCTYPE html>\n<html>\n<head>"
           "<meta http-equiv=\"Content-Type\" content=\"text/html; charset=iso-8859-1\">"
           "<title>Neuer Radweg</title></head>\n<body>\n" +
           nav_block() +
           "<h1>Neuer Radweg am Kanal ist fertig</h1>\n"
           "<p>Der neue Radweg entlang des Kanals wurde am Dienstag freigegeben und "
           "verbindet jetzt den Bahnhof mit dem Gewerbegebiet im Norden. Die Strecke "
           "ist knapp sechs Kilometer lang, durchgehend beleuchtet und im Winter "
           "ger\344umt. An der alten Schleuse entstand eine kleine Br\374cke f\374r "
           "Fu\337g\344nger und R\344der, damit niemand mehr die Bundesstra\337e "
           "\374berqueren muss. Die Stadt rechnet damit, dass viele Pendler nun das "
           "Rad nehmen, weil der Weg k\374rzer ist als die Fahrt mit dem Auto durch "
           "die Baustellen.</p>\n"
           "<p>Finanziert wurde der Bau zum gr\366\337ten Teil aus einem "
           "F\366rderprogramm des Landes, den Rest trugen die Stadtwerke. Im "
           "Fr\374hjahr sollen noch B\344nke, Z\344hlstellen und eine "
           "Luftpumpenstation folgen. Der Radverkehrsbeauftragte nennt den Weg einen "
           "Anfang und w\374nscht sich als n\344chstes eine sichere Verbindung zur "
           "Schule am S\374dring, die bisher nur \374ber die enge Dorfstra\337e "
           "erreichbar ist.</p>\n" +
           footer_block() + "</body>\n</html>\n";
}

WarcRecord response(const std::string& url, const std::string& date,
                    const std::string& content_type, const std::string& html) {
    WarcRecord r;
    r.record_type = WarcRecordType::response;
    r.target_uri = url;
    r.date = date;
    r.content_type = "text/html";
    r.payload = http_wrap(content_type, html);
    return r;
}

std::vector<WarcRecord> build_records() {
    std::vector<WarcRecord> records;
    records.push_back(response("http://en.example.org/garden",
                               "2016-02-05T10:00:00Z",
                               "text/html; charset=utf-8", garden_html()));
    records.push_back(response("http://en.example.org/library",
                               "2016-02-05T10:01:00Z",
                               "text/html; charset=utf-8", library_html()));
    records.push_back(response("http://en.example.org/trail-guide",
                               "2016-02-05T10:02:00Z",
                               "text/html; charset=utf-8", trail_html("granite")));
    records.push_back(response("http://en.example.org/trail-guide-update",
                               "2016-02-05T10:03:00Z",
                               "text/html; charset=utf-8", trail_html("limestone")));
    records.push_back(response("http://en.example.org/bakery",
                               "2016-02-05T10:04:00Z",
                               "text/html; charset=utf-8", bakery_html()));
    records.push_back(response("http://en.example.org/observatory",
                               "2016-02-05T10:05:00Z",
                               "text/html; charset=windows-1252", observatory_html()));
    records.push_back(response("http://en.example.org/ferry",
                               "2016-02-05T10:06:00Z",
                               "text/html; charset=utf-8", ferry_html()));
    records.push_back(response("http://de.example.org/stadtfest",
                               "2016-02-05T10:07:00Z",
                               "text/html; charset=utf-8", stadtfest_html()));
    records.push_back(response("http://de.example.org/radweg",
                               "2016-02-05T10:08:00Z", "text/html", radweg_html()));
    records.push_back(response("http://mirror.example.net/garden-copy",
                               "2016-02-05T10:09:00Z",
                               "text/html; charset=utf-8", garden_html()));
    return records;
}

}  // namespace

const std::vector<WarcRecord>& crawl_records() {
    static const std::vector<WarcRecord> records = build_records();
    return records;
}

std::string crawl_warc_bytes(bool gzip_members) {
    std::vector<WarcRecord> all;
    WarcRecord info;
    info.record_type = WarcRecordType::warcinfo;
    info.date = "2016-02-05T09:59:00Z";
    info.content_type = "application/warc-fields";
    info.payload = "software: fixture-writer/1.0\r\n";
    all.push_back(info);

    WarcRecord request;
    request.record_type = WarcRecordType::request;
    request.target_uri = "http://en.example.org/garden";
    request.date = "2016-02-05T10:00:00Z";
    request.content_type = "application/http; msgtype=request";
    request.payload = "GET /garden HTTP/1.1\r\nHost: en.example.org\r\n\r\n";
    all.push_back(request);

    for (const WarcRecord& r : crawl_records()) all.push_back(r);

    WarcRecord plain;
    plain.record_type = WarcRecordType::response;
    plain.target_uri = "http://en.example.org/robots.txt";
    plain.date = "2016-02-05T10:10:00Z";
    plain.content_type = "text/plain";
    plain.payload = http_wrap("text/plain", "User-agent: *\nDisallow:\n");
    all.push_back(plain);

    std::string out;
    for (const WarcRecord& r : all) {
        std::string bytes = depcc::serialize_record(r);
        out += gzip_members ? depcc::gzip_compress(bytes) : bytes;
    }
    return out;
}

std::string write_crawl_warc(const std::string& dir, bool gzip_members) {
    std::filesystem::create_directories(dir);
    std::string path = dir + (gzip_members ? "/crawl.warc.gz" : "/crawl.warc");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::string bytes = crawl_warc_bytes(gzip_members);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    return path;
}

}  // namespace fixtures
