#include "fastinf/io.hpp"
#include "fastinf/pipeline.hpp"

#include <curl/curl.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <memory>

namespace fastinf {

namespace {

using json = nlohmann::json;

json read_lock(const std::filesystem::path& lockfile) {
  if (!std::filesystem::exists(lockfile)) return json{{"files", json::object()}};
  auto parsed = json::parse(read_file(lockfile));
  if (!parsed.contains("files")) parsed["files"] = json::object();
  return parsed;
}

size_t write_to_file(char* data, size_t size, size_t count, void* stream) {
  return std::fwrite(data, size, count, static_cast<std::FILE*>(stream));
}

void download(const std::string& url, const std::filesystem::path& target) {
  static const bool initialized = [] { return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK; }();
  if (!initialized) throw FetchError("libcurl initialization failed");

  std::unique_ptr<std::FILE, decltype(&std::fclose)> file(std::fopen(target.c_str(), "wb"), &std::fclose);
  if (!file) throw FetchError("cannot write " + target.string());
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
  if (!curl) throw FetchError("libcurl handle allocation failed");

  char error[CURL_ERROR_SIZE] = {};
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, &write_to_file);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, file.get());
  curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, error);
  const CURLcode rc = curl_easy_perform(curl.get());
  file.reset();
  if (rc != CURLE_OK) {
    std::filesystem::remove(target);
    throw FetchError("fetch " + url + ": " + (error[0] ? std::string(error) : curl_easy_strerror(rc)));
  }
}

}  // namespace

FetchResult fetch_dataset(const std::string& url, const std::filesystem::path& destination,
                          const std::filesystem::path& lockfile, const std::optional<std::string>& expected_sha256) {
  json lock = read_lock(lockfile);
  const std::string key = destination.filename().string();
  std::optional<std::string> pinned = expected_sha256;
  if (!pinned && lock["files"].contains(key)) pinned = lock["files"][key]["sha256"].get<std::string>();

  FetchResult result;
  result.path = destination;
  if (pinned && std::filesystem::exists(destination) && sha256_file(destination) == *pinned) {
    result.sha256 = *pinned;
    return result;
  }

  if (destination.has_parent_path()) std::filesystem::create_directories(destination.parent_path());
  auto partial = destination;
  partial += ".part";
  download(url, partial);
  const std::string digest = sha256_file(partial);
  if (pinned && digest != *pinned) {
    std::filesystem::remove(partial);
    throw IntegrityError("fetch " + url + ": sha256 " + digest + " does not match pinned " + *pinned);
  }
  std::filesystem::rename(partial, destination);

  lock["files"][key] = {{"url", url}, {"sha256", digest}};
  write_file_atomic(lockfile, lock.dump(2) + "\n");
  result.sha256 = digest;
  result.downloaded = true;
  return result;
}

}  // namespace fastinf
