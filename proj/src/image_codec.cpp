#include "vospp/image_codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

namespace vospp {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        const bool reading = mode[0] == 'r';
        throw IoError(reading ? IoErrorKind::missing_file : IoErrorKind::encode,
                      std::string(reading ? "cannot open " : "cannot create ") + path.string());
    }
    return f;
}

bool has_png_signature(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

// libpng reports fatal errors by longjmp; all C++ objects touched between
// setjmp and the jump are declared before setjmp in the same frame.
struct PngErrorText {
    char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* text = static_cast<PngErrorText*>(png_get_error_ptr(png));
    if (text) std::snprintf(text->message, sizeof(text->message), "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

std::array<std::uint8_t, 3> davis_palette_color(std::uint8_t index) {
    std::uint8_t r = 0, g = 0, b = 0;
    unsigned c = index;
    for (int j = 0; j < 8; ++j) {
        r |= static_cast<std::uint8_t>(((c >> 0) & 1u) << (7 - j));
        g |= static_cast<std::uint8_t>(((c >> 1) & 1u) << (7 - j));
        b |= static_cast<std::uint8_t>(((c >> 2) & 1u) << (7 - j));
        c >>= 3;
    }
    return {r, g, b};
}

IndexImage read_index_png(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError(IoErrorKind::missing_file, "missing mask " + path.string());
    FilePtr file = open_file(path, "rb");
    IndexImage image;
    std::vector<png_bytep> rows;
    PngErrorText error;
    bool unsupported = false;

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(IoErrorKind::decode, "libpng initialisation failed for " + path.string());
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(IoErrorKind::decode, path.string() + ": " + error.message);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE || (color_type == PNG_COLOR_TYPE_GRAY && depth <= 8)) {
        if (depth < 8) png_set_packing(png);
        png_read_update_info(png, info);
        image.extent = {static_cast<int>(width), static_cast<int>(height)};
        image.indices.resize(static_cast<std::size_t>(width) * height);
        rows.resize(height);
        for (png_uint_32 r = 0; r < height; ++r) rows[r] = image.indices.data() + static_cast<std::size_t>(r) * width;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } else {
        unsupported = true;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (unsupported) {
        throw IoError(IoErrorKind::decode, path.string() + ": mask must be an 8-bit palette or grayscale PNG");
    }
    return image;
}

void write_index_png(const std::filesystem::path& path, const IndexImage& image) {
    require(image.indices.size() == image.extent.area(), "write_index_png: buffer size mismatch");
    FilePtr file = open_file(path, "wb");
    std::vector<png_color> palette(256);
    for (int i = 0; i < 256; ++i) {
        const auto rgb = davis_palette_color(static_cast<std::uint8_t>(i));
        palette[i] = {rgb[0], rgb[1], rgb[2]};
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.extent.height));
    for (int r = 0; r < image.extent.height; ++r) {
        rows[r] = const_cast<png_bytep>(image.indices.data() + static_cast<std::size_t>(r) * image.extent.width);
    }
    PngErrorText error;

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError(IoErrorKind::encode, "libpng initialisation failed for " + path.string());
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(IoErrorKind::encode, path.string() + ": " + error.message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.extent.width), static_cast<png_uint_32>(image.extent.height),
                 8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace {

RgbFrame read_png_rgb(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError(IoErrorKind::decode, path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        const std::string message = image.message;
        png_image_free(&image);
        throw IoError(IoErrorKind::decode, path.string() + ": " + message);
    }
    return RgbFrame(static_cast<int>(image.width), static_cast<int>(image.height), std::move(pixels));
}

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RgbFrame read_jpeg_rgb(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    jpeg_decompress_struct cinfo;
    JpegError err;
    std::vector<std::uint8_t> pixels;
    int width = 0;
    int height = 0;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError(IoErrorKind::decode, path.string() + ": " + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return RgbFrame(width, height, std::move(pixels));
}

}  // namespace

RgbFrame read_rgb_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError(IoErrorKind::missing_file, "missing frame " + path.string());
    return has_png_signature(path) ? read_png_rgb(path) : read_jpeg_rgb(path);
}

void write_rgb_png(const std::filesystem::path& path, const RgbFrame& frame) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width());
    image.height = static_cast<png_uint_32>(frame.height());
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, frame.pixels().data(), 0, nullptr)) {
        throw IoError(IoErrorKind::encode, path.string() + ": " + image.message);
    }
}

}  // namespace vospp
