#include <doctest.h>

#include <filesystem>

#include "gtt/harness.hpp"
#include "gtt/synth.hpp"
#include "gtt/trainer.hpp"

using namespace gtt;
namespace fs = std::filesystem;

namespace {

NetConfig tiny_net() {
    NetConfig c;
    c.input_size = 8;
    c.conv_stages = {{4, 3, 1, 2}};
    c.fc_layers = 2;
    c.fc_width = 8;
    c.dropout = 0.0;
    return c;
}

TrainingData small_data(std::uint64_t seed, int videos = 2, int frames = 4) {
    TrainingData data;
    for (int i = 0; i < videos; ++i) {
        SyntheticSceneConfig sc;
        sc.canvas_width = 48;
        sc.canvas_height = 36;
        sc.frame_count = frames;
        sc.seed = seed + static_cast<std::uint64_t>(i);
        sc.id = "v" + std::to_string(i);
        data.videos.push_back(to_sequence_data(generate_synthetic_video(sc)));
    }
    data.stills = make_training_stills(data.videos);
    return data;
}

} // namespace

TEST_CASE("batches alternate a video block and an image block") {
    const TrainingData data = small_data(1);
    TrainConfig cfg;
    cfg.batch_size = 22;
    cfg.k3 = 10;
    Rng rng(1);
    const auto batch = assemble_batch<float>(data, tiny_net(), cfg, rng);
    REQUIRE(batch.size() == 22);
    CHECK(batch[0].provenance == Provenance::video_real);
    for (int i = 1; i <= 10; ++i) CHECK(batch[i].provenance == Provenance::video_augmented);
    for (int i = 11; i < 22; ++i) CHECK(batch[i].provenance == Provenance::image_augmented);
}

TEST_CASE("videos_only with augmentation off yields only real pairs") {
    const TrainingData data = small_data(2);
    TrainConfig cfg;
    cfg.batch_size = 6;
    cfg.mix = SourceMix::videos_only;
    cfg.augmentation = AugmentationMode::none;
    Rng rng(2);
    const auto batch = assemble_batch<float>(data, tiny_net(), cfg, rng);
    REQUIRE(batch.size() == 6);
    for (const auto& ex : batch) CHECK(ex.provenance == Provenance::video_real);
}

TEST_CASE("augmented crops dominate by the configured ratio") {
    const TrainingData data = small_data(3);
    TrainConfig cfg;
    cfg.batch_size = 44;
    cfg.k3 = 10;
    Rng rng(3);
    const auto batch = assemble_batch<float>(data, tiny_net(), cfg, rng);
    int real = 0;
    for (const auto& ex : batch)
        if (ex.provenance == Provenance::video_real) ++real;
    // two full video blocks of (1 real + 10 augmented) fit in 44
    CHECK(real == 2);
}

TEST_CASE("aug_per_batch pins the augmented count exactly") {
    const TrainingData data = small_data(4);
    TrainConfig cfg;
    cfg.batch_size = 10;
    cfg.aug_per_batch = 4;
    cfg.k3 = 2;
    cfg.mix = SourceMix::videos_only;
    Rng rng(4);
    const auto batch = assemble_batch<float>(data, tiny_net(), cfg, rng);
    REQUIRE(batch.size() == 10);
    int real = 0, augmented = 0;
    for (const auto& ex : batch)
        (ex.provenance == Provenance::video_real ? real : augmented) += 1;
    CHECK(real == 6);
    CHECK(augmented == 4);

    cfg.aug_per_batch = 10;  // no room left for a real example
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("identical seeds produce identical batches") {
    const TrainingData data = small_data(5);
    TrainConfig cfg;
    cfg.batch_size = 12;
    cfg.k3 = 3;
    Rng r1(6), r2(6);
    const auto a = assemble_batch<float>(data, tiny_net(), cfg, r1);
    const auto b = assemble_batch<float>(data, tiny_net(), cfg, r2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].search_crop.v == b[i].search_crop.v);
        CHECK(a[i].target_crop.v == b[i].target_crop.v);
    }
}

TEST_CASE("a static pair labels the centered half-extent code") {
    Image img(40, 40, 128.f);
    const BoundingBox box{10, 10, 20, 20};
    const auto ex = make_pair_example<float>(img, box, img, box, box, tiny_net(), 2.0, 2.0,
                                             Provenance::video_real);
    CHECK(ex.label[0] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(ex.label[1] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(ex.label[2] == doctest::Approx(7.5).epsilon(1e-6));
    CHECK(ex.label[3] == doctest::Approx(7.5).epsilon(1e-6));
}

TEST_CASE("a fifth-of-width shift moves the label by one code unit") {
    Image img(60, 60, 128.f);
    const BoundingBox prev{20, 20, 30, 30};
    const BoundingBox curr{22, 20, 32, 30};  // +w/5 in x
    const auto ex = make_pair_example<float>(img, prev, img, curr, prev, tiny_net(), 2.0, 2.0,
                                             Provenance::video_real);
    CHECK(ex.label[0] == doctest::Approx(3.5).epsilon(1e-6));
    CHECK(ex.label[1] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(ex.label[2] == doctest::Approx(8.5).epsilon(1e-6));
    CHECK(ex.label[3] == doctest::Approx(7.5).epsilon(1e-6));
}

TEST_CASE("zero pseudo-motion keeps the image pair label centered") {
    Image img(40, 40, 100.f);
    const BoundingBox box{12, 12, 22, 22};
    MotionModel m;
    m.dx.scale = m.dy.scale = 1e-300;
    m.gw.scale = m.gh.scale = 1e-300;
    Rng rng(7);
    TrainConfig cfg;
    const auto ex = make_image_pseudo_pair<float>(img, box, m, rng, tiny_net(), cfg);
    CHECK(ex.provenance == Provenance::image_augmented);
    CHECK(ex.label[0] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(ex.label[3] == doctest::Approx(7.5).epsilon(1e-6));
}

TEST_CASE("training overfits a single repeated pair") {
    TrainingData data = small_data(8, 1, 2);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.mix = SourceMix::videos_only;
    cfg.augmentation = AugmentationMode::none;
    cfg.learning_rate = 5e-3;
    cfg.iterations = 1500;
    cfg.seed = 8;
    Network<float> net(tiny_net(), 8);
    const TrainResult res = train(cfg, data, net, "");
    REQUIRE(res.iterations_run == 1500);
    CHECK_FALSE(res.aborted);
    CHECK(res.losses.front() > res.losses.back());
    CHECK(*std::min_element(res.losses.begin(), res.losses.end()) < 0.1);
    CHECK(net.mode() == NetMode::eval);
}

TEST_CASE("a zero learning rate leaves the loss flat") {
    TrainingData data = small_data(9, 1, 2);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.mix = SourceMix::videos_only;
    cfg.augmentation = AugmentationMode::none;
    cfg.learning_rate = 0.0;
    cfg.iterations = 5;
    Network<float> net(tiny_net(), 9);
    const TrainResult res = train(cfg, data, net, "");
    for (double l : res.losses) CHECK(l == res.losses[0]);
}

TEST_CASE("checkpoints land on schedule with a resumable state file") {
    TrainingData data = small_data(10, 1, 2);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.mix = SourceMix::videos_only;
    cfg.augmentation = AugmentationMode::none;
    cfg.iterations = 4;
    cfg.checkpoint_every = 2;
    Network<float> net(tiny_net(), 10);
    const fs::path dir = fs::temp_directory_path() / "gtt_test_ckpt";
    fs::remove_all(dir);
    const TrainResult res = train(cfg, data, net, dir.string());
    CHECK(fs::exists(dir / "checkpoint_2.net"));
    CHECK(fs::exists(dir / "checkpoint_2.net.state"));
    CHECK(fs::exists(dir / "checkpoint_4.net"));
    CHECK(res.last_checkpoint == (dir / "checkpoint_4.net").string());

    const Network<float> restored = Network<float>::load(res.last_checkpoint);
    CHECK(restored == net);

    std::ifstream state(dir / "checkpoint_2.net.state");
    std::string text((std::istreambuf_iterator<char>(state)), std::istreambuf_iterator<char>());
    CHECK(text.find("iteration = 2") != std::string::npos);
    CHECK(text.find("rng_state") != std::string::npos);
    fs::remove_all(dir);

    const std::string log_path = (fs::temp_directory_path() / "gtt_test_log.csv").string();
    write_training_log(res, cfg, log_path);
    std::ifstream log(log_path);
    std::string header;
    std::getline(log, header);
    CHECK(header == "iteration,loss,lr,source_mix");
    std::remove(log_path.c_str());
}

TEST_CASE("train config round-trips through key-value form") {
    TrainConfig cfg;
    cfg.batch_size = 17;
    cfg.k3 = 4;
    cfg.learning_rate = 3e-4;
    cfg.loss = LossKind::l2;
    cfg.augmentation = AugmentationMode::uniform;
    cfg.mix = SourceMix::images_only;
    cfg.motion.dx.scale = 0.11;
    cfg.online_learning_rate = 1e-6;
    const TrainConfig back = TrainConfig::from_kv(cfg.to_kv());
    CHECK(back.batch_size == 17);
    CHECK(back.loss == LossKind::l2);
    CHECK(back.mix == SourceMix::images_only);
    CHECK(back.motion.dx.scale == doctest::Approx(0.11).epsilon(1e-12));
    CHECK(back.motion.mode == AugmentationMode::uniform);  // follows augmentation
    CHECK(back.online_learning_rate == doctest::Approx(1e-6));
}

TEST_CASE("still extraction applies the fill filter") {
    TrainingData data;
    SequenceData seq;
    seq.meta.id = "s";
    Image img(100, 100, 50.f);
    seq.frames = {Frame8::from_image(img), Frame8::from_image(img)};
    seq.meta.annotations = {{0, {0, 0, 70, 10}, 0},   // too wide
                            {1, {10, 10, 40, 40}, 0}};
    const auto stills = make_training_stills({seq});
    REQUIRE(stills.size() == 1);
    CHECK(stills[0].box.x2 == 40);
}

TEST_CASE("enabled-but-empty sources are an error") {
    TrainingData data = small_data(11, 1, 2);
    data.stills.clear();
    TrainConfig cfg;
    cfg.batch_size = 4;
    Rng rng(11);
    CHECK_THROWS_AS(assemble_batch<float>(data, tiny_net(), cfg, rng), std::runtime_error);
    cfg.mix = SourceMix::videos_only;
    CHECK_NOTHROW(assemble_batch<float>(data, tiny_net(), cfg, rng));
}
