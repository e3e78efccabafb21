#include "greid/harness/image_io.hpp"

#include "greid/error.hpp"

#if GREID_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

namespace greid::harness {

bool image_decoding_available() {
#if GREID_HAVE_OPENCV
    return true;
#else
    return false;
#endif
}

RgbImage load_image(const std::filesystem::path& path) {
#if GREID_HAVE_OPENCV
    const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw Error("missing-image", "cannot decode " + path.string());
    RgbImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            std::uint8_t* px = img.at(x, y);
            px[0] = row[x][2];
            px[1] = row[x][1];
            px[2] = row[x][0];
        }
    }
    return img;
#else
    throw Error("unsupported", "built without an image decoder; cannot read " + path.string(), ErrorKind::runtime);
#endif
}

}  // namespace greid::harness
